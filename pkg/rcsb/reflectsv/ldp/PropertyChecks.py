##
# File:    PropertyChecks.py
# Author:  J. Westbrook
# Date:    17-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Exact property suites on random discrete paths and controls: the Skorokhod map identities
and the controlled-map round trips. Used by the selftest subcommand and the unit tests.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import time
from collections import namedtuple

import numpy as np

from rcsb.reflectsv.ldp.CoefficientModels import makeReflectedBmDrift, makeReflectedOu
from rcsb.reflectsv.ldp.ControlledSkeleton import hatMap, mOperator, solveControlled
from rcsb.reflectsv.ldp.NoiseGenerator import STREAM_PROPERTY, counterGenerator
from rcsb.reflectsv.ldp.PathUtils import Control, Path, TimeGrid, modulusOfContinuity, skorokhodValues

logger = logging.getLogger(__name__)

PropertyReport = namedtuple("PropertyReport", "name nChecked nFailed maxViolation")


class _Tally(object):
    def __init__(self, name, tol):
        self.name = name
        self.tol = tol
        self.nChecked = 0
        self.nFailed = 0
        self.maxViolation = 0.0

    def add(self, violationA):
        vA = np.atleast_1d(np.asarray(violationA, dtype=np.float64))
        self.nChecked += vA.shape[0]
        self.nFailed += int(np.sum(~(vA <= self.tol)))
        if vA.size:
            self.maxViolation = max(self.maxViolation, float(np.max(vA)))

    def report(self):
        return PropertyReport(self.name, self.nChecked, self.nFailed, self.maxViolation)


def randomWalkPaths(nPaths, nSteps, seed, scale=1.0):
    """Node values of random piecewise-linear paths with Gaussian increments and mixed starts."""
    gen = counterGenerator(seed, STREAM_PROPERTY, nSteps)
    startA = scale * gen.standard_normal(nPaths) * (gen.random(nPaths) < 0.5)
    incA = scale * gen.standard_normal((nPaths, nSteps)) / np.sqrt(nSteps)
    return np.concatenate((startA[:, np.newaxis], startA[:, np.newaxis] + np.cumsum(incA, axis=1)), axis=1)


def skorokhodSuite(nPaths=10000, stepList=(16, 1000), seed=0, tol=1.0e-12):
    """Check the reflection identities on random paths.

    Lipschitz uses the constant 2: |Gamma p1 - Gamma p2|(t) <= 2 max_{s<=t} |p1 - p2|(s).

    Args:
        nPaths (int, optional): paths per step count
        stepList (tuple, optional): grid sizes
        seed (int, optional): generator seed
        tol (float, optional): absolute tolerance

    Returns:
        list: PropertyReport per property
    """
    tallyD = {
        name: _Tally(name, tol)
        for name in ("nonnegativity", "fixed_point", "homogeneity", "sup_bound", "lipschitz", "modulus_contraction", "zero_characterization")
    }
    for nSteps in stepList:
        grid = TimeGrid(1.0, nSteps)
        gen = counterGenerator(seed, STREAM_PROPERTY, nSteps + 1)
        pA = randomWalkPaths(nPaths, nSteps, seed)
        qA = randomWalkPaths(nPaths, nSteps, seed + 1)
        gpA = skorokhodValues(pA)
        gqA = skorokhodValues(qA)
        tallyD["nonnegativity"].add(np.max(-gpA, axis=1))
        # reflected paths are nonnegative, so they are fixed points
        tallyD["fixed_point"].add(np.max(np.abs(skorokhodValues(gpA) - gpA), axis=1))
        alphaA = 3.0 * gen.random(nPaths)
        tallyD["homogeneity"].add(np.max(np.abs(skorokhodValues(alphaA[:, np.newaxis] * pA) - alphaA[:, np.newaxis] * gpA), axis=1))
        runSupA = np.maximum.accumulate(np.abs(pA), axis=1)
        tallyD["sup_bound"].add(np.max(gpA - 2.0 * runSupA, axis=1))
        runDiffA = np.maximum.accumulate(np.abs(pA - qA), axis=1)
        tallyD["lipschitz"].add(np.max(np.abs(gpA - gqA) - 2.0 * runDiffA, axis=1))
        # nonincreasing paths from 0 map to zero, and only those
        downA = -np.concatenate((np.zeros((nPaths, 1)), np.cumsum(np.abs(np.diff(pA, axis=1)), axis=1)), axis=1)
        tallyD["zero_characterization"].add(np.max(np.abs(skorokhodValues(downA)), axis=1))
        isZero = np.all(gpA == 0.0, axis=1)
        isDown = (pA[:, 0] <= 0.0) & np.all(np.diff(pA, axis=1) <= 0.0, axis=1)
        tallyD["zero_characterization"].add((isZero != isDown).astype(np.float64))
        deltaA = grid.dt * (0.5 + 10.0 * gen.random(nPaths))
        violL = []
        for ii in range(nPaths):
            delta = min(float(deltaA[ii]), grid.T)
            violL.append(modulusOfContinuity(Path(grid, gpA[ii]), delta) - modulusOfContinuity(Path(grid, pA[ii]), delta))
        tallyD["modulus_contraction"].add(violL)
    return [tally.report() for tally in tallyD.values()]


def controlRoundTripSuite(nControls=1000, nSteps=100, seed=0, tol=1.0e-10):
    """m_operator after solve_controlled recovers the control; hat_map equals Gamma of the G map."""
    grid = TimeGrid(1.0, nSteps)
    gen = counterGenerator(seed, STREAM_PROPERTY + 1, nSteps)
    csL = [makeReflectedOu(1.0, 0.5, 0.4, 0.0), makeReflectedBmDrift(0.3, 1.0, 0.0)]
    roundTrip = _Tally("m_operator_round_trip", tol)
    hatExact = _Tally("hat_map_exact", 0.0)
    for ii in range(nControls):
        cs = csL[ii % len(csL)]
        y0 = float(gen.random()) if ii % 3 else 0.0
        g = Control(grid, 2.0 * gen.standard_normal(nSteps))
        sol = solveControlled(cs, y0, g)
        gBack = mOperator(cs, y0, sol.phi)
        roundTrip.add(np.max(np.abs(gBack.derivative - g.derivative)) / max(1.0, float(np.max(np.abs(g.derivative)))))
        hatExact.add(np.max(np.abs(hatMap(cs, y0, g).values - skorokhodValues(sol.phi.values))))
    return [roundTrip.report(), hatExact.report()]


def runSelfTest(seed=0, nPaths=10000, nControls=1000):
    """Run all exact suites.

    Returns:
        (bool, list): overall status and PropertyReport list
    """
    startTime = time.time()
    reportL = skorokhodSuite(nPaths=nPaths, seed=seed) + controlRoundTripSuite(nControls=nControls, seed=seed)
    ok = True
    for rpt in reportL:
        status = rpt.nFailed == 0
        ok = ok and status
        logger.info("%-24s checked %8d failed %4d max violation %.3e", rpt.name, rpt.nChecked, rpt.nFailed, rpt.maxViolation)
    logger.info("Self test status %r (%.2f seconds)", ok, time.time() - startTime)
    return ok, reportL
