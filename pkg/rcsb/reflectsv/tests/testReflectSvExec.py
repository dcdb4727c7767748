##
# File:    testReflectSvExec.py
# Author:  J. Westbrook
# Date:    17-Oct-2026
# Version: 0.001
#
# Update:
##
"""
Tests of the command line workflows, output artifacts and exit codes.
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

from rcsb.utils.io.MarshalUtil import MarshalUtil
from rcsb.reflectsv.ldp import __version__
from rcsb.reflectsv.ldp.ReflectSvExec import EXIT_OK, EXIT_VALIDATION, ReflectSvExec, main
from rcsb.reflectsv.ldp.RunConfig import RunConfig

HERE = os.path.abspath(os.path.dirname(__file__))
TOPDIR = os.path.dirname(os.path.dirname(os.path.dirname(HERE)))

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()


class ReflectSvExecTests(unittest.TestCase):
    skipFull = platform.system() != "Linux"

    def setUp(self):
        self.__startTime = time.time()
        self.__workPath = os.path.join(HERE, "test-output", "exec")
        self.__mU = MarshalUtil()
        self.__mU.mkdir(self.__workPath)
        logger.debug("Running tests on version %s", __version__)
        logger.info("Starting %s at %s", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()))

    def tearDown(self):
        unitS = "MB" if platform.system() == "Darwin" else "GB"
        rusageMax = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        logger.info("Maximum resident memory size %.4f %s", rusageMax / 10 ** 6, unitS)
        endTime = time.time()
        logger.info("Completed %s at %s (%.4f seconds)", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()), endTime - self.__startTime)

    def __writeConfig(self, fileName, configD):
        fp = os.path.join(self.__workPath, fileName)
        self.assertTrue(self.__mU.doExport(fp, configD, fmt="json", indent=3))
        return fp

    def __runMain(self, subcommand, configD, outName, extraL=None):
        outDir = os.path.join(self.__workPath, outName)
        argL = [subcommand, "--out", outDir, "--workers", "1"]
        if configD is not None:
            argL.extend(["--config", self.__writeConfig(outName + "-config.json", configD)])
        argL.extend(extraL or [])
        return main(argL), outDir

    def __load(self, outDir, fileName):
        fp = os.path.join(outDir, fileName)
        self.assertTrue(self.__mU.exists(fp), "missing %s" % fp)
        return self.__mU.doImport(fp, fmt="json")

    def testValidationExit(self):
        exitCode, outDir = self.__runMain("simulate", {"model": {"family": "reflected_ou", "qq": 1.0}}, "bad-config")
        self.assertEqual(exitCode, EXIT_VALIDATION)
        manifestD = self.__load(outDir, "manifest.json")
        self.assertEqual(manifestD["exit_code"], EXIT_VALIDATION)
        self.assertEqual(manifestD["subcommand"], "simulate")
        self.assertIsNone(manifestD["config"])
        # every subcommand except selftest needs a configuration
        exitCode, outDir = self.__runMain("rate", None, "no-config")
        self.assertEqual(exitCode, EXIT_VALIDATION)
        self.assertEqual(self.__load(outDir, "manifest.json")["exit_code"], EXIT_VALIDATION)

    def testSimulate(self):
        configD = {
            "model": {"family": "reflected_ou", "q": 1.0, "m": 0.5, "xi": 0.4, "mu": 0.0, "y0": 0.2, "rho": -0.3},
            "grid": {"n_steps": 20},
            "mc": {"eps": [1.0, 0.5], "n_replicas": 40, "block_size": 16, "seed": 7},
        }
        resultL = []
        for outName in ("simulate-a", "simulate-b"):
            exitCode, outDir = self.__runMain("simulate", configD, outName)
            self.assertEqual(exitCode, EXIT_OK)
            rD = self.__load(outDir, "simulate.json")
            self.assertEqual(rD["statistic"], "terminal_logprice")
            self.assertEqual([row["eps"] for row in rD["estimates"]], [1.0, 0.5])
            self.assertTrue(all(row["n"] == 40 for row in rD["estimates"]))
            self.assertTrue(self.__mU.exists(os.path.join(outDir, "simulate.csv")))
            manifestD = self.__load(outDir, "manifest.json")
            self.assertEqual(manifestD["seed"], 7)
            self.assertEqual(manifestD["grid"], {"T": 1.0, "n_steps": 20})
            self.assertEqual(sorted(manifestD["artifacts"]), ["simulate.csv", "simulate.json"])
            resultL.append(rD["estimates"])
        self.assertEqual(resultL[0], resultL[1])
        # the seed override changes the replicas
        exitCode, outDir = self.__runMain("simulate", configD, "simulate-c", extraL=["--seed", "8"])
        self.assertEqual(exitCode, EXIT_OK)
        self.assertEqual(self.__load(outDir, "manifest.json")["seed"], 8)
        self.assertNotEqual(self.__load(outDir, "simulate.json")["estimates"], resultL[0])

    def testRate(self):
        configD = {
            "model": {"family": "constant_vol", "sigma0": 0.3, "rho": 0.5},
            "grid": {"n_steps": 20},
            "rate": {"n_starts": 3, "seed": 0, "target_kind": "itilde", "x": 0.09},
        }
        exitCode, outDir = self.__runMain("rate", configD, "rate-itilde")
        self.assertEqual(exitCode, EXIT_OK)
        rD = self.__load(outDir, "rate.json")
        self.assertEqual(rD["target_kind"], "itilde")
        self.assertAlmostEqual(rD["value"], 0.045, delta=1.0e-5)
        self.assertTrue(self.__mU.exists(os.path.join(outDir, "rate_minimizer.csv")))
        #
        configD["rate"] = {"target_kind": "sup_bound"}
        exitCode, _ = self.__runMain("rate", configD, "rate-missing-y")
        self.assertEqual(exitCode, EXIT_VALIDATION)
        configD = {"model": {"family": "reflected_bm_drift", "a": 0.0, "xi": 1.0, "mu": 0.0}, "grid": {"n_steps": 20}, "rate": {"target_kind": "sup_bound", "y": 1.0}}
        exitCode, outDir = self.__runMain("rate", configD, "rate-sup-bound")
        self.assertEqual(exitCode, EXIT_OK)
        self.assertAlmostEqual(self.__load(outDir, "rate.json")["value"], 0.5, places=6)

    def testPriceMartingale(self):
        configD = {
            "model": {"family": "reflected_ou", "q": 1.0, "m": 0.0, "xi": 1.0e-12, "mu": 0.02, "y0": 0.0, "rho": -0.5, "r": 0.02},
            "grid": {"n_steps": 20},
            "mc": {"n_replicas": 200},
        }
        exitCode, outDir = self.__runMain("price", configD, "price-martingale")
        self.assertEqual(exitCode, EXIT_OK)
        rD = self.__load(outDir, "martingale.json")
        self.assertEqual(rD["n"], 200)
        self.assertLess(abs(rD["mean"] - 1.0), 1.0e-12)

    def testPriceCall(self):
        configD = {
            "model": {"family": "constant_vol", "sigma0": 0.2, "r": 0.05},
            "grid": {"n_steps": 10},
            "mc": {"eps": [1.0], "n_replicas": 20000, "seed": 5},
            "option": {"kind": "vanilla_call", "K": 1.0},
        }
        exitCode, outDir = self.__runMain("price", configD, "price-call")
        self.assertEqual(exitCode, EXIT_OK)
        rD = self.__load(outDir, "price.json")
        est = rD["estimates"][0]
        self.assertEqual(rD["option"]["kind"], "vanilla_call")
        self.assertLess(abs(est["mean"] - 0.10450584), 4.0 * est["stderr"])

    @unittest.skipIf(skipFull, "Large deviation check - troubleshooting test")
    def testLdpCheck(self):
        configD = {
            "model": {"family": "constant_vol", "sigma0": 1.0},
            "grid": {"n_steps": 20},
            "mc": {"eps_ladder": [0.4, 0.3, 0.2], "n_replicas": 40000, "seed": 2},
            "rate": {"n_starts": 2, "seed": 0},
            "option": {"kind": "binary_up_in", "K": math.e},
        }
        exitCode, outDir = self.__runMain("ldp-check", configD, "ldp-check")
        self.assertEqual(exitCode, EXIT_OK)
        rD = self.__load(outDir, "ldp.json")
        logger.info("Slope %.5f variational %.5f gap %.4f", rD["slope"], rD["variational_value"], rD["relative_gap"])
        self.assertAlmostEqual(rD["variational_value"], 0.5, places=6)
        self.assertEqual(len(rD["mc_points"]), 3)
        self.assertEqual(rD["censored"], [])
        self.assertEqual(rD["prefactor_exponent"], 0.5)
        self.assertLess(rD["relative_gap"], 0.15)
        self.assertTrue(self.__mU.exists(os.path.join(outDir, "ldp_plot.csv")))

    def testSelfTest(self):
        outDir = os.path.join(self.__workPath, "selftest")
        self.__mU.mkdir(outDir)
        runConfig = RunConfig({"model": {"family": "constant_vol", "sigma0": 0.2}, "mc": {"seed": 3}, "output": {"directory": outDir}})
        rex = ReflectSvExec(runConfig, numProc=1)
        self.assertEqual(rex.selfTest(nPaths=200, nControls=50), EXIT_OK)
        self.assertEqual(rex.artifacts, ["selftest.json"])
        rD = self.__load(outDir, "selftest.json")
        self.assertTrue(rD["passed"])
        self.assertTrue(all(chk["nFailed"] == 0 for chk in rD["checks"]))


def suiteExecTests():
    suiteSelect = unittest.TestSuite()
    suiteSelect.addTest(ReflectSvExecTests("testValidationExit"))
    suiteSelect.addTest(ReflectSvExecTests("testRate"))
    suiteSelect.addTest(ReflectSvExecTests("testSelfTest"))
    return suiteSelect


if __name__ == "__main__":
    #
    mySuite = suiteExecTests()
    unittest.TextTestRunner(verbosity=2).run(mySuite)
