##
# File:    ControlledSkeleton.py
# Author:  J. Westbrook
# Date:    15-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Deterministic skeleton maps: the controlled ODE solution map G, the reflected
skeleton f -> fhat = Gamma(G fdot), and the inverse-control operator.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging

import numpy as np

from rcsb.utils.io.MarshalUtil import MarshalUtil
from rcsb.reflectsv.ldp.PathUtils import Control, Path
from rcsb.reflectsv.ldp.ReflectSvErrors import ReplicaAbortError, ValidationError

logger = logging.getLogger(__name__)


class ControlledSolution(object):
    def __init__(self, phi, reflected, control):
        self.phi = phi
        self.reflected = reflected
        self.control = control


def solveControlledBatch(cs, y0, grid, gA):
    """Forward Euler for phi' = a(t, Gamma phi) + c(t, Gamma phi) g over rows of controls.

    Args:
        cs (CoefficientSet): coefficients
        y0 (float): initial state
        grid (TimeGrid): time grid
        gA (array): (nRows, nSteps) control derivative samples

    Returns:
        (phi, reflected): (nRows, nSteps + 1) node arrays, non-finite rows left as computed
    """
    gA = np.atleast_2d(np.asarray(gA, dtype=np.float64))
    nRows, nSteps = gA.shape
    if nSteps != grid.nSteps:
        raise ValidationError("Control holds %d samples but the grid has %d steps" % (nSteps, grid.nSteps))
    dt = grid.dt
    tA = grid.nodes()
    phiA = np.empty((nRows, nSteps + 1))
    refA = np.empty((nRows, nSteps + 1))
    phiA[:, 0] = y0
    runMin = np.minimum(phiA[:, 0], 0.0)
    refA[:, 0] = phiA[:, 0] - runMin
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(nSteps):
            rk = refA[:, k]
            phiA[:, k + 1] = phiA[:, k] + (cs.a(tA[k], rk) + cs.c(tA[k], rk) * gA[:, k]) * dt
            runMin = np.minimum(runMin, np.minimum(phiA[:, k + 1], 0.0))
            refA[:, k + 1] = phiA[:, k + 1] - runMin
    return phiA, refA


def solveControlled(cs, y0, g):
    """Discrete G map for a single control.

    Args:
        cs (CoefficientSet): coefficients
        y0 (float): initial state, nonnegative
        g (Control): driving control samples

    Returns:
        ControlledSolution: phi, Gamma phi and the control
    """
    if y0 < 0.0:
        raise ValidationError("Initial state must be nonnegative, got %r" % y0)
    phiA, refA = solveControlledBatch(cs, y0, g.grid, g.derivative[np.newaxis, :])
    finA = np.isfinite(phiA[0])
    if not np.all(finA):
        step = int(np.argmin(finA))
        raise ReplicaAbortError("Non-finite controlled state at node %d" % step, stepIndex=step)
    return ControlledSolution(Path(g.grid, phiA[0]), Path(g.grid, refA[0]), g)


def hatMap(cs, y0, f):
    """fhat = Gamma(G fdot) for a control f."""
    return solveControlled(cs, y0, f).reflected


def mOperator(cs, y0, phi):
    """Control recovering phi through the G map: [phi'(k) - a] / c at the reflected state.

    Args:
        cs (CoefficientSet): coefficients with strictly positive c
        y0 (float): initial state
        phi (Path): path starting at y0

    Returns:
        Control: derivative samples whose integral is the inverse-control image of phi
    """
    if not cs.cStrictlyPositive:
        raise ValidationError("Inverse control requires a strictly positive diffusion coefficient")
    if abs(phi.values[0] - y0) > 1.0e-12 * max(1.0, abs(y0)):
        raise ValidationError("Path starts at %r but the initial state is %r" % (phi.values[0], y0))
    grid = phi.grid
    tA = grid.leftNodes()
    vA = phi.values
    refA = vA - np.minimum.accumulate(np.minimum(vA, 0.0))
    cA = cs.c(tA, refA[:-1])
    if np.any(cA <= 0.0):
        raise ValidationError("Diffusion coefficient is not positive along the path")
    dPhi = np.diff(vA) / grid.dt
    return Control(grid, (dPhi - cs.a(tA, refA[:-1])) / cA)


def l1WitnessControl(cs, grid):
    """Control fdot = -a(t, 0) / c(t, 0) that holds the skeleton at zero when y0 = 0."""
    tA = grid.leftNodes()
    cA = cs.c(tA, np.zeros_like(tA))
    if np.any(cA <= 0.0):
        raise ValidationError("Witness control requires c(t, 0) > 0")
    return Control(grid, -cs.a(tA, np.zeros_like(tA)) / cA)


def exportSolutionCsv(solution, filePath):
    mU = MarshalUtil()
    tA = solution.phi.grid.nodes()
    rowL = [{"t": float(t), "phi": float(p), "reflected": float(r)} for t, p, r in zip(tA, solution.phi.values, solution.reflected.values)]
    return mU.doExport(filePath, rowL, fmt="csv")
