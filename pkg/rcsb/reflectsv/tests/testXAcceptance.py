##
# File:    testXAcceptance.py
# Author:  J. Westbrook
# Date:    18-Oct-2026
# Version: 0.001
#
# Update:
##
"""
Full size acceptance runs: equality in law, large deviation slopes, the martingale check
and grid refinement.  These run only when REFLECTSV_ACCEPTANCE is set.
"""

__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import math
import os
import platform
import resource
import time
import unittest

import numpy as np

from rcsb.reflectsv.ldp import __version__
from rcsb.reflectsv.ldp.BatchEstimateExecMp import BatchEstimateExecMp
from rcsb.reflectsv.ldp.CoefficientModels import ModelSpec, makeConstantVol, makeExponentialVol, makeReflectedBmDrift, makeReflectedOu
from rcsb.reflectsv.ldp.MultiStartOptimizer import OptimizerConfig
from rcsb.reflectsv.ldp.NoiseGenerator import STREAM_B, STREAM_BASELINE, NoiseGenerator
from rcsb.reflectsv.ldp.OptionPricing import DEFAULT_LADDER, OptionSpec, barrierLdpReport, callLdpReport, digitalLdpReport, extrapolateSlope, martingaleCheck, relativeGap
from rcsb.reflectsv.ldp.PathUtils import TimeGrid
from rcsb.reflectsv.ldp.RateFunction import BarrierSet, itilde, l1Infimum, qtildePathsetInf, supVolatilityRateBound
from rcsb.reflectsv.ldp.RunConfig import workerCount
from rcsb.reflectsv.ldp.VolatilitySimulator import equalityInLawTest, simulateAbsDriftedBm, simulateAbsOu, simulateVolatilityBatch

HERE = os.path.abspath(os.path.dirname(__file__))
TOPDIR = os.path.dirname(os.path.dirname(os.path.dirname(HERE)))

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()

ACCEPTANCE_ENV = "REFLECTSV_ACCEPTANCE"


def _reflectedBm():
    return ModelSpec(makeReflectedBmDrift(0.0, 1.0, 0.0), y0=0.0, s0=1.0, rho=0.0, r=0.0, T=1.0)


def _constantVol(sigma0):
    return ModelSpec(makeConstantVol(sigma0, 0.0), y0=0.0, s0=1.0, rho=0.0, r=0.0, T=1.0)


def _reflectedOu(y0):
    return ModelSpec(makeReflectedOu(1.0, 0.2, 0.3, 0.0), y0=y0, s0=1.0, rho=-0.5, r=0.0, T=1.0)


class AcceptanceTests(unittest.TestCase):
    skipAcceptance = os.environ.get(ACCEPTANCE_ENV) is None

    def setUp(self):
        self.__startTime = time.time()
        self.__grid = TimeGrid(1.0, 100)
        self.__optCfg = OptimizerConfig(nStarts=4, seed=0)
        self.__numProc = workerCount()
        logger.debug("Running tests on version %s", __version__)
        logger.info("Starting %s at %s", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()))

    def tearDown(self):
        unitS = "MB" if platform.system() == "Darwin" else "GB"
        rusageMax = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        logger.info("Maximum resident memory size %.4f %s", rusageMax / 10 ** 6, unitS)
        endTime = time.time()
        logger.info("Completed %s at %s (%.4f seconds)", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()), endTime - self.__startTime)

    def __pickTarget(self, spec, candidateL, lo=0.3, hi=1.0):
        """First candidate x whose itilde value lies in [lo, hi]."""
        for x in candidateL:
            value = itilde(spec, x, opt=self.__optCfg, grid=self.__grid).value
            logger.info("Candidate x %.4f itilde %.6f", x, value)
            if lo <= value <= hi:
                return x, value
        self.fail("No candidate target in %r has a rate in [%.2f, %.2f]" % (candidateL, lo, hi))
        return None

    def __terminalVolatility(self, spec, grid, nRep, seed, blockSize=2000):
        nG = NoiseGenerator(seed)
        termL = []
        for start in range(0, nRep, blockSize):
            (dB,) = nG.generateBlock(grid, start, min(blockSize, nRep - start), streamList=(STREAM_B,))
            termL.append(simulateVolatilityBatch(spec, 1.0, grid, dB)[1][:, -1])
        return np.concatenate(termL)

    @unittest.skipIf(skipAcceptance, "Equality in law acceptance - troubleshooting test")
    def testEqualityInLaw(self):
        grid = TimeGrid(1.0, 2000)
        nRep = 10000
        q, xi, y0 = 1.0, 0.5, 0.3
        nG = NoiseGenerator(1)
        ouL, bmL = [], []
        for start in range(0, nRep, 2000):
            (nA,) = nG.generateBlock(grid, start, 2000, streamList=(STREAM_BASELINE,))
            nA /= math.sqrt(grid.dt)
            ouL.append(simulateAbsOu(q, 0.0, xi, y0, grid, nA)[:, -1])
            bmL.append(simulateAbsDriftedBm(0.0, xi, y0, grid, nA)[:, -1])
        baseD = {"ou": np.concatenate(ouL), "bm": np.concatenate(bmL)}
        for cs, base, expectReject in (
            (makeReflectedOu(q, 0.0, xi, 0.0), "ou", False),
            (makeReflectedOu(q, 1.0, xi, 0.0), "ou", True),
            (makeReflectedBmDrift(0.0, xi, 0.0), "bm", False),
            (makeReflectedBmDrift(1.0, xi, 0.0), "bm", True),
        ):
            spec = ModelSpec(cs, y0=y0, s0=1.0, rho=0.0, r=0.0, T=1.0)
            ks = equalityInLawTest(self.__terminalVolatility(spec, grid, nRep, 0), baseD[base], level=0.01)
            logger.info("%r against |%s| p-value %.3g", cs, base, ks.pValue)
            self.assertEqual(ks.reject, expectReject)

    @unittest.skipIf(skipAcceptance, "Reflected BM digital slope acceptance - troubleshooting test")
    def testDigitalSlopeReflectedBm(self):
        spec = _reflectedBm()
        k, value = self.__pickTarget(spec, (0.3, 0.45, 0.6))
        rpt = digitalLdpReport(spec, math.exp(k), nReplicas=400000, seed=11, optCfg=self.__optCfg, grid=self.__grid, numProc=self.__numProc, nPoints=16)
        logger.info("Digital k %.3f slope %r variational %.6f gap %r", k, rpt.extrapolatedSlope, rpt.variationalValue, rpt.relativeGap)
        self.assertAlmostEqual(rpt.variationalValue, value, delta=1.0e-6)
        self.assertAlmostEqual(rpt.extraD["argmin_x"], k, places=9)
        self.assertLess(rpt.relativeGap, 0.15)
        # volatility supremum decays at y^2 / (2 T)
        y = 1.0
        bound = supVolatilityRateBound(spec, y, grid=self.__grid)
        self.assertAlmostEqual(bound, 0.5 * y * y, places=8)
        bE = BatchEstimateExecMp(spec, self.__grid, verbose=False)
        estL = [bE.estimate(eps, 400000, 12, "sup_volatility_indicator", statisticParams={"level": y}, numProc=self.__numProc) for eps in DEFAULT_LADDER]
        slope, _, censoredL = extrapolateSlope(DEFAULT_LADDER, [est.mean for est in estL], [est.stderr for est in estL], prefactorExponent=0.5)
        logger.info("Volatility supremum slope %r bound %.6f", slope, bound)
        self.assertEqual(censoredL, [])
        self.assertLess(relativeGap(slope, bound), 0.15)

    @unittest.skipIf(skipAcceptance, "Barrier slope acceptance - troubleshooting test")
    def testBarrierSlopes(self):
        argD = {"nReplicas": 400000, "seed": 21, "optCfg": self.__optCfg, "grid": self.__grid, "numProc": self.__numProc}
        rpt = barrierLdpReport(_constantVol(1.0), OptionSpec("binary_up_in", math.e), **argD)
        logger.info("Up-in slope %r gap %r", rpt.extrapolatedSlope, rpt.relativeGap)
        self.assertAlmostEqual(rpt.variationalValue, 0.5, delta=1.0e-3)
        self.assertLess(rpt.relativeGap, 0.15)
        # rate 2 is fitted on a coarser ladder
        rpt = barrierLdpReport(_constantVol(1.0), OptionSpec("binary_down_in", math.exp(-2.0)), epsLadder=(1.0, 0.8, 0.6, 0.4), **argD)
        logger.info("Down-in slope %r gap %r", rpt.extrapolatedSlope, rpt.relativeGap)
        self.assertAlmostEqual(rpt.variationalValue, 2.0, delta=1.0e-3)
        self.assertEqual(rpt.censored, [])
        self.assertLess(rpt.relativeGap, 0.15)
        expSpec = ModelSpec(makeExponentialVol(0.0, 0.0, makeReflectedBmDrift(0.0, 1.0, 0.0)), y0=0.0, s0=1.0, rho=0.0, r=0.0, T=1.0)
        rpt = barrierLdpReport(expSpec, OptionSpec("binary_up_in", math.e), **argD)
        logger.info("Exponential volatility up-in slope %r variational %.6f gap %r", rpt.extrapolatedSlope, rpt.variationalValue, rpt.relativeGap)
        self.assertLess(rpt.variationalValue, 0.5)
        self.assertLess(rpt.relativeGap, 0.20)

    @unittest.skipIf(skipAcceptance, "Martingale acceptance - troubleshooting test")
    def testMartingale(self):
        spec = ModelSpec(makeReflectedOu(1.0, 0.2, 0.3, 0.03), y0=0.2, s0=1.0, rho=-0.5, r=0.03, T=1.0)
        for sp in (spec, ModelSpec(makeConstantVol(0.2, 0.03), y0=0.0, s0=1.0, rho=0.0, r=0.03, T=1.0)):
            rpt = martingaleCheck(sp, 1000000, 31, grid=self.__grid, numProc=self.__numProc)
            est = rpt.estimate
            logger.info("%s discounted mean %.7f stderr %.3g", sp.coefficients.family, est.mean, est.stderr)
            self.assertTrue(rpt.tested)
            self.assertLessEqual(abs(est.mean - sp.s0), 3.0 * est.stderr)
            self.assertTrue(rpt.passed)

    @unittest.skipIf(skipAcceptance, "Call slope acceptance - troubleshooting test")
    def testCallSlope(self):
        spec = _reflectedOu(0.2)
        x, value = self.__pickTarget(spec, (0.15, 0.2, 0.25, 0.3))
        rpt = callLdpReport(spec, math.exp(x), nReplicas=400000, seed=41, optCfg=self.__optCfg, grid=self.__grid, numProc=self.__numProc, nPoints=16)
        logger.info("Call log-moneyness %.3f slope %r variational %.6f gap %r", x, rpt.extrapolatedSlope, rpt.variationalValue, rpt.relativeGap)
        self.assertLessEqual(rpt.variationalValue, value + 1.0e-9)
        self.assertLess(rpt.relativeGap, 0.20)
        # y0 = 0 reports the regular and the degenerate branch
        rpt = callLdpReport(_reflectedOu(0.0), math.exp(x), epsLadder=(0.4, 0.3, 0.2), nReplicas=20000, seed=42, optCfg=self.__optCfg, grid=self.__grid, numProc=self.__numProc, nPoints=8)
        self.assertIn("L2", rpt.extraD["branch_values"])
        self.assertIn("degenerate_branch", rpt.extraD)
        self.assertIsNotNone(rpt.extraD["degenerate_branch"]["value"])

    @unittest.skipIf(skipAcceptance, "Grid refinement acceptance - troubleshooting test")
    def testGridRefinement(self):
        ouSpec = _reflectedOu(0.2)
        bmSpec = ModelSpec(makeReflectedBmDrift(1.0, 1.0, 0.0), y0=0.0, s0=1.0, rho=0.0, r=0.0, T=1.0)
        valueL = []
        digitalL = []
        for nSteps in (100, 200, 400):
            grid = TimeGrid(1.0, nSteps)
            digitalL.append(itilde(_reflectedBm(), 0.45, opt=self.__optCfg, grid=grid).value)
            if nSteps == 400:
                break
            valueL.append(
                (
                    itilde(ModelSpec(makeConstantVol(0.3, 0.0), y0=0.0, s0=1.0, rho=0.5, r=0.0, T=1.0), 0.09, opt=self.__optCfg, grid=grid).value,
                    l1Infimum(bmSpec, opt=self.__optCfg, grid=grid),
                    itilde(ouSpec, 0.0, opt=self.__optCfg, grid=grid).value,
                    qtildePathsetInf(_constantVol(1.0), BarrierSet("up_in", math.e), opt=self.__optCfg, grid=grid).value,
                    qtildePathsetInf(_constantVol(1.0), BarrierSet("down_in", math.exp(-2.0)), opt=self.__optCfg, grid=grid).value,
                )
            )
        logger.info("Refinement values %r digital %r", valueL, digitalL)
        for coarse, fine in zip(valueL[0], valueL[1]):
            self.assertLess(abs(coarse - fine), 1.0e-3)
        # first order convergence of the left-endpoint rule halves the change per doubling
        self.assertLess(abs(digitalL[2] - digitalL[1]), 0.75 * abs(digitalL[1] - digitalL[0]) + 1.0e-6)
        # terminal statistics agree within 3 combined standard errors
        for spec, statistic, paramD in ((_reflectedBm(), "terminal_indicator", {"level": 0.45}), (ouSpec, "terminal_logprice", None)):
            estL = [
                BatchEstimateExecMp(spec, TimeGrid(1.0, nSteps), verbose=False).estimate(0.3, 100000, 51, statistic, statisticParams=paramD, numProc=self.__numProc)
                for nSteps in (100, 200)
            ]
            combined = math.sqrt(estL[0].stderr ** 2 + estL[1].stderr ** 2)
            logger.info("%s means %.6f %.6f combined stderr %.3g", statistic, estL[0].mean, estL[1].mean, combined)
            self.assertLess(abs(estL[0].mean - estL[1].mean), 3.0 * combined)


def suiteAcceptanceTests():
    suiteSelect = unittest.TestSuite()
    suiteSelect.addTest(AcceptanceTests("testEqualityInLaw"))
    suiteSelect.addTest(AcceptanceTests("testDigitalSlopeReflectedBm"))
    suiteSelect.addTest(AcceptanceTests("testBarrierSlopes"))
    suiteSelect.addTest(AcceptanceTests("testMartingale"))
    suiteSelect.addTest(AcceptanceTests("testCallSlope"))
    suiteSelect.addTest(AcceptanceTests("testGridRefinement"))
    return suiteSelect


if __name__ == "__main__":
    #
    mySuite = suiteAcceptanceTests()
    unittest.TextTestRunner(verbosity=2).run(mySuite)
