##
# File: ReflectSvExec.py
# Date: 17-Oct-2026  jdw
#
#  Execution wrapper  --  configuration driven runs of the simulation, rate and pricing workflows
#
#  Updates:
#
##
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import argparse
import logging
import math
import os
import sys
import time

from rcsb.utils.io.MarshalUtil import MarshalUtil
from rcsb.reflectsv.ldp import __version__
from rcsb.reflectsv.ldp.BatchEstimateExecMp import BatchEstimateExecMp
from rcsb.reflectsv.ldp.ControlledSkeleton import exportSolutionCsv, solveControlled
from rcsb.reflectsv.ldp.OptionPricing import barrierLdpReport, callLdpReport, digitalLdpReport, martingaleCheck, mcOptionPrice
from rcsb.reflectsv.ldp.PathUtils import exportPathCsv, importPathCsv, integrateControl
from rcsb.reflectsv.ldp.PropertyChecks import runSelfTest
from rcsb.reflectsv.ldp.RateFunction import BarrierSet, itilde, jRate, qtilde, qtildePathsetInf, supVolatilityRateBound
from rcsb.reflectsv.ldp.ReflectSvErrors import NonConvergenceError, NumericalFailure, ReplicaAbortError, ValidationError
from rcsb.reflectsv.ldp.RunConfig import RunConfig, workerCount

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("simulate", "rate", "price", "ldp-check", "selftest")
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _estimateRow(est):
    return {"eps": est.eps, "mean": est.mean, "stderr": est.stderr, "n": est.nReplicas, "aborted": est.aborted}


class ReflectSvExec(object):
    def __init__(self, runConfig, numProc=1, verbose=False, seed=None):
        """Runner for one subcommand over a resolved configuration.

        Args:
            runConfig (RunConfig): resolved configuration (None is accepted for selftest)
            numProc (int, optional): worker processes. Defaults to 1.
            verbose (bool, optional): verbose worker logging. Defaults to False.
            seed (int, optional): selftest seed when no configuration is given. Defaults to 0.
        """
        self.__cfg = runConfig
        self.__seed = int(seed) if seed is not None else 0
        self.__numProc = numProc
        self.__verbose = verbose
        self.__mU = MarshalUtil()
        self.__outDir = runConfig.get("output", "directory") if runConfig else "."
        self.__formats = runConfig.get("output", "formats") if runConfig else ["json", "csv"]
        self.__artifactL = []

    @property
    def artifacts(self):
        return list(self.__artifactL)

    def __path(self, fileName):
        return os.path.join(self.__outDir, fileName)

    def __writeJson(self, fileName, obj):
        if "json" not in self.__formats:
            return
        fp = self.__path(fileName)
        ok = self.__mU.doExport(fp, obj, fmt="json", indent=3)
        logger.info("Wrote %s status %r", fp, ok)
        self.__artifactL.append(fileName)

    def __writeCsv(self, fileName, rowL):
        if "csv" not in self.__formats or not rowL:
            return
        fp = self.__path(fileName)
        ok = self.__mU.doExport(fp, rowL, fmt="csv")
        logger.info("Wrote %s (%d rows) status %r", fp, len(rowL), ok)
        self.__artifactL.append(fileName)

    def run(self, subcommand):
        self.__mU.mkdir(self.__outDir)
        if subcommand == "simulate":
            return self.simulate()
        if subcommand == "rate":
            return self.rate()
        if subcommand == "price":
            return self.price()
        if subcommand == "ldp-check":
            return self.ldpCheck()
        if subcommand == "selftest":
            return self.selfTest()
        raise ValidationError("Unknown subcommand %r" % subcommand)

    def simulate(self):
        cfg = self.__cfg
        spec = cfg.modelSpec()
        bex = BatchEstimateExecMp(spec, cfg.grid(), workPath=self.__outDir, verbose=self.__verbose)
        rowL = []
        for eps in cfg.get("mc", "eps"):
            est = bex.estimate(
                eps,
                cfg.get("mc", "n_replicas"),
                cfg.get("mc", "seed"),
                cfg.get("mc", "statistic"),
                statisticParams=cfg.statisticParams(),
                numProc=self.__numProc,
                blockSize=cfg.get("mc", "block_size"),
            )
            logger.info("eps %r %s mean %.10g stderr %.3g aborted %d", eps, est.statistic, est.mean, est.stderr, est.aborted)
            rowL.append(_estimateRow(est))
        self.__writeCsv("simulate.csv", rowL)
        self.__writeJson("simulate.json", {"statistic": cfg.get("mc", "statistic"), "estimates": rowL})
        nAborted = sum(row["aborted"] for row in rowL)
        if nAborted:
            raise ReplicaAbortError("%d replicas aborted" % nAborted)
        return EXIT_OK

    def rate(self):
        cfg = self.__cfg
        spec = cfg.modelSpec()
        grid = cfg.grid()
        opt = cfg.optimizerConfig(numProc=self.__numProc)
        rtD = cfg.section("rate")
        kind = rtD["target_kind"]
        if kind == "sup_bound":
            if rtD["y"] is None:
                raise ValidationError("Config key rate.y is required for target_kind sup_bound")
            value = supVolatilityRateBound(spec, rtD["y"], grid=grid)
            self.__writeJson("rate.json", {"target_kind": kind, "y": rtD["y"], "value": value if math.isfinite(value) else None})
            return EXIT_OK
        if kind == "itilde":
            if rtD["x"] is None:
                raise ValidationError("Config key rate.x is required for target_kind itilde")
            result = itilde(spec, rtD["x"], opt, grid=grid)
        elif kind in ("qtilde", "j_rate"):
            if rtD["path_file"] is None:
                raise ValidationError("Config key rate.path_file is required for target_kind %s" % kind)
            target = importPathCsv(rtD["path_file"])
            result = qtilde(spec, target, opt) if kind == "qtilde" else jRate(spec, target, opt)
        else:
            if rtD["set_kind"] is None or rtD["K"] is None:
                raise ValidationError("Config keys rate.set_kind and rate.K are required for target_kind qtilde_pathset")
            result = qtildePathsetInf(spec, BarrierSet(rtD["set_kind"], rtD["K"]), opt, grid=grid, allowDegenerate=rtD["allow_degenerate"])
        #
        rD = result.toDict()
        rD["target_kind"] = kind
        if kind == "itilde":
            rD["x"] = rtD["x"]
        if "csv" in self.__formats:
            rD["minimizer_csv"] = "rate_minimizer.csv"
            exportPathCsv(integrateControl(result.minimizerF), self.__path("rate_minimizer.csv"))
            self.__artifactL.append("rate_minimizer.csv")
            if result.minimizerG is not None:
                exportPathCsv(result.minimizerG, self.__path("rate_minimizer_g.csv"))
                self.__artifactL.append("rate_minimizer_g.csv")
            if spec.coefficients.family != "constant_vol" and not result.infinite:
                exportSolutionCsv(solveControlled(spec.coefficients, spec.y0, result.minimizerF), self.__path("rate_skeleton.csv"))
                self.__artifactL.append("rate_skeleton.csv")
        self.__writeJson("rate.json", rD)
        logger.info("Rate %s value %r branch %s converged %d/%d", kind, result.value, result.branch, result.convergedStarts, result.nStarts)
        if result.nStarts > 0 and not result.isConverged():
            raise NonConvergenceError("No optimizer start converged (%d starts)" % result.nStarts)
        return EXIT_OK

    def price(self):
        """Option prices over mc.eps, or the martingale check when no option is configured."""
        cfg = self.__cfg
        spec = cfg.modelSpec()
        grid = cfg.grid()
        nReplicas = cfg.get("mc", "n_replicas")
        seed = cfg.get("mc", "seed")
        if cfg.get("option", "kind") is None:
            rpt = martingaleCheck(spec, nReplicas, seed, grid=grid, numProc=self.__numProc)
            self.__writeJson("martingale.json", rpt.toDict())
            if rpt.estimate.aborted:
                raise ReplicaAbortError("%d replicas aborted" % rpt.estimate.aborted)
            return EXIT_OK
        opt = cfg.optionSpec()
        rowL = []
        for eps in cfg.get("mc", "eps"):
            est = mcOptionPrice(spec, opt, eps, nReplicas, seed, grid=grid, numProc=self.__numProc, blockSize=cfg.get("mc", "block_size"))
            logger.info("%s eps %r price %.10g stderr %.3g", opt.kind, eps, est.mean, est.stderr)
            rowL.append(_estimateRow(est))
        self.__writeCsv("price.csv", rowL)
        self.__writeJson("price.json", {"option": opt.toDict(), "estimates": rowL})
        nAborted = sum(row["aborted"] for row in rowL)
        if nAborted:
            raise ReplicaAbortError("%d replicas aborted" % nAborted)
        return EXIT_OK

    def ldpCheck(self):
        cfg = self.__cfg
        spec = cfg.modelSpec()
        grid = cfg.grid()
        opt = cfg.optionSpec()
        argD = {
            "epsLadder": cfg.get("mc", "eps_ladder"),
            "nReplicas": cfg.get("mc", "n_replicas"),
            "seed": cfg.get("mc", "seed"),
            "optCfg": cfg.optimizerConfig(numProc=1),
            "grid": grid,
            "numProc": self.__numProc,
        }
        if opt.isBinary():
            report = barrierLdpReport(spec, opt, **argD)
        elif opt.kind == "vanilla_call":
            report = callLdpReport(spec, opt.K, nPoints=cfg.get("rate", "n_points"), **argD)
        else:
            report = digitalLdpReport(spec, opt.K, nPoints=cfg.get("rate", "n_points"), G=opt.G, **argD)
        self.__writeJson("ldp.json", report.toDict())
        self.__writeCsv("ldp_plot.csv", report.plotRows())
        logger.info("%s slope %r variational %r relative gap %r censored %r", opt.kind, report.extrapolatedSlope, report.variationalValue, report.relativeGap, report.censored)
        if report.rateResult is not None and report.rateResult.nStarts > 0 and not report.rateResult.isConverged():
            raise NonConvergenceError("Variational value did not converge for %s" % opt.kind)
        return EXIT_OK

    def selfTest(self, nPaths=10000, nControls=1000):
        seed = self.__cfg.get("mc", "seed") if self.__cfg else self.__seed
        ok, reportL = runSelfTest(seed=seed, nPaths=nPaths, nControls=nControls)
        self.__writeJson("selftest.json", {"passed": ok, "checks": [rpt._asdict() for rpt in reportL]})
        if not ok:
            raise NumericalFailure("Self test failed for %s" % ", ".join(rpt.name for rpt in reportL if rpt.nFailed))
        return EXIT_OK


def writeManifest(outDir, subcommand, runConfig, seed, startTime, artifactList, exitCode):
    mU = MarshalUtil()
    manifestD = {
        "subcommand": subcommand,
        "version": __version__,
        "config": runConfig.toDict() if runConfig else None,
        "seed": seed,
        "grid": {"T": runConfig.get("grid", "T"), "n_steps": runConfig.get("grid", "n_steps")} if runConfig else None,
        "start_time": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(startTime)),
        "wall_time": time.time() - startTime,
        "artifacts": artifactList,
        "exit_code": exitCode,
    }
    mU.mkdir(outDir)
    return mU.doExport(os.path.join(outDir, "manifest.json"), manifestD, fmt="json", indent=3)


def main(argv=None):
    parser = argparse.ArgumentParser(description="Reflected stochastic volatility simulation, rate functions and small-noise pricing checks")
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="Workflow to run")
    parser.add_argument("--config", default=None, help="Run configuration JSON file (required except for selftest)")
    parser.add_argument("--out", default=None, help="Output directory (overrides output.directory)")
    parser.add_argument("--workers", default=None, type=int, help="Number of worker processes (default: cpu count, capped by REFLECTSV_MAX_WORKERS)")
    parser.add_argument("--seed", default=None, type=int, help="Seed override for mc.seed and rate.seed")
    parser.add_argument("--verbose", default=False, action="store_true", help="Verbose output")
    args = parser.parse_args(argv)
    #
    logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    startTime = time.time()
    runConfig = None
    outDir = args.out or "."
    artifactL = []
    try:
        logger.info("Using source version %s", __version__)
        if args.config:
            runConfig = RunConfig.fromFile(args.config)
            runConfig.applyOverrides(seed=args.seed, outDir=args.out)
            outDir = runConfig.get("output", "directory")
        elif args.subcommand != "selftest":
            raise ValidationError("Subcommand %s requires --config" % args.subcommand)
        numProc = workerCount(args.workers)
        rex = ReflectSvExec(runConfig, numProc=numProc, verbose=args.verbose, seed=args.seed)
        try:
            exitCode = rex.run(args.subcommand)
        finally:
            artifactL = rex.artifacts
    except ValidationError as e:
        logger.error("Validation failing with %s", str(e))
        exitCode = EXIT_VALIDATION
    except NumericalFailure as e:
        logger.error("Numerical failure %s", str(e))
        exitCode = EXIT_NUMERICAL
    except Exception as e:
        logger.exception("Failing with %s", str(e))
        exitCode = EXIT_FAILURE
    #
    try:
        seed = runConfig.get("mc", "seed") if runConfig else (args.seed or 0)
        writeManifest(outDir, args.subcommand, runConfig, seed, startTime, artifactL, exitCode)
    except Exception as e:
        logger.exception("Failing to write manifest with %s", str(e))
    logger.info("Completed %s with exit code %d (%.2f seconds)", args.subcommand, exitCode, time.time() - startTime)
    return exitCode


if __name__ == "__main__":
    sys.exit(main())
