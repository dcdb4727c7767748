##
# File:    MultiStartOptimizer.py
# Author:  J. Westbrook
# Date:    16-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Multi-start quasi-Newton minimization over discretized controls.

Problems expose a batch objective over rows of scaled control coordinates; gradients are
central finite differences evaluated as one batch. Each start runs L-BFGS-B and may be
limited in wall-clock time. Starts are independent work items for a process pool and the
reduction is a deterministic minimum.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import math
import time
from collections import namedtuple

import numpy as np
from scipy.optimize import minimize
from wrapt_timeout_decorator import timeout

from rcsb.utils.multiproc.MultiProcUtil import MultiProcUtil
from rcsb.reflectsv.ldp.NoiseGenerator import STREAM_OPTIMIZER, counterGenerator
from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)

StartRecord = namedtuple("StartRecord", "startIndex value converged gradientNorm energy nIterations message z")
MultiStartResult = namedtuple("MultiStartResult", "best records")

BIG_VALUE = 1.0e30
TIE_TOLERANCE = 1.0e-12


class OptimizerConfig(object):
    """Optimizer settings shared by all rate function evaluators."""

    def __init__(
        self,
        nStarts=8,
        maxIterations=500,
        gradientTolerance=1.0e-6,
        finiteDifferenceStep=1.0e-6,
        startScale=0.5,
        constraintPenaltySchedule=(1.0e2, 1.0e4, 1.0e6),
        seed=0,
        timeOut=None,
        numProc=1,
    ):
        self.nStarts = int(nStarts)
        self.maxIterations = int(maxIterations)
        self.gradientTolerance = float(gradientTolerance)
        self.finiteDifferenceStep = float(finiteDifferenceStep)
        self.startScale = float(startScale)
        self.constraintPenaltySchedule = tuple(float(v) for v in constraintPenaltySchedule)
        self.seed = int(seed)
        self.timeOut = timeOut
        self.numProc = int(numProc) if numProc else 1
        if self.nStarts < 1:
            raise ValidationError("Optimizer needs at least one start, got %r" % nStarts)
        for name in ("maxIterations", "gradientTolerance", "finiteDifferenceStep", "startScale"):
            if not getattr(self, name) > 0:
                raise ValidationError("Optimizer setting %s must be positive, got %r" % (name, getattr(self, name)))
        sched = self.constraintPenaltySchedule
        if not sched or sched[0] <= 0.0 or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValidationError("Penalty schedule must be positive and strictly increasing, got %r" % (sched,))
        if self.timeOut is not None and not float(self.timeOut) > 0.0:
            raise ValidationError("Optimizer time out must be positive seconds, got %r" % timeOut)
        if self.seed < 0:
            raise ValidationError("Optimizer seed must be nonnegative, got %r" % seed)

    def replace(self, **kwargs):
        argD = self.toDict()
        argD.update(kwargs)
        return OptimizerConfig(**argD)

    def toDict(self):
        return {
            "nStarts": self.nStarts,
            "maxIterations": self.maxIterations,
            "gradientTolerance": self.gradientTolerance,
            "finiteDifferenceStep": self.finiteDifferenceStep,
            "startScale": self.startScale,
            "constraintPenaltySchedule": list(self.constraintPenaltySchedule),
            "seed": self.seed,
            "timeOut": self.timeOut,
            "numProc": self.numProc,
        }


def valueAndGradient(z, problem, fdStep):
    """Objective and central-difference gradient from one batch of 2d + 1 evaluations."""
    d = z.shape[0]
    hA = fdStep * np.maximum(1.0, np.abs(z))
    stencil = np.tile(z, (2 * d + 1, 1))
    idx = np.arange(d)
    stencil[1 + idx, idx] += hA
    stencil[1 + d + idx, idx] -= hA
    vA = problem.evaluateBatch(stencil)
    f0 = vA[0]
    if not np.isfinite(f0):
        return BIG_VALUE, np.zeros(d)
    with np.errstate(invalid="ignore"):
        gA = (vA[1 : d + 1] - vA[d + 1 :]) / (2.0 * hA)
    gA[~np.isfinite(gA)] = 0.0
    return float(f0), gA


def projectedGradientNorm(z, gA, bounds):
    if bounds is None:
        return float(np.linalg.norm(gA))
    pA = gA.copy()
    for k, (lo, hi) in enumerate(bounds):
        if lo is not None and z[k] <= lo + 1.0e-12 and pA[k] > 0.0:
            pA[k] = 0.0
        if hi is not None and z[k] >= hi - 1.0e-12 and pA[k] < 0.0:
            pA[k] = 0.0
    return float(np.linalg.norm(pA))


def clipToBounds(z, bounds):
    if bounds is None:
        return z
    loA = np.array([-np.inf if lo is None else lo for lo, _ in bounds])
    hiA = np.array([np.inf if hi is None else hi for _, hi in bounds])
    return np.clip(z, loA, hiA)


class MultiStartWorker(object):
    def __init__(self, problem, config, verbose=False):
        self.__problem = problem
        self.__cfg = config
        self.__verbose = verbose
        self.timeOut = config.timeOut

    @timeout("instance.timeOut", use_signals=False, dec_allow_eval=True)
    def __runStart(self, startIndex, z0):
        cfg = self.__cfg
        problem = self.__problem
        bounds = getattr(problem, "bounds", None)
        res = minimize(
            valueAndGradient,
            z0,
            args=(problem, cfg.finiteDifferenceStep),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": cfg.maxIterations, "gtol": cfg.gradientTolerance, "ftol": 1.0e-13},
        )
        zOpt = np.asarray(res.x, dtype=np.float64)
        value, gA = valueAndGradient(zOpt, problem, cfg.finiteDifferenceStep)
        gNorm = projectedGradientNorm(zOpt, gA, bounds)
        finite = value < BIG_VALUE
        converged = bool(finite and (res.success or gNorm <= cfg.gradientTolerance))
        energy = 0.5 * float(np.dot(zOpt, zOpt))
        return StartRecord(startIndex, value if finite else math.inf, converged, gNorm, energy, int(res.nit), str(res.message), zOpt)

    def optimize(self, dataList, procName, optionsD, workingDir):
        """Worker method to run optimizer starts.

        Args:
            dataList (list): list of start indices
            procName (str): processName
            optionsD (dict): dictionary of options with the start matrix
            workingDir (str): path to working directory (not used)

        Returns:
            (successList, resultList, []): success list of start indices and start records
        """
        _ = workingDir
        startsA = optionsD["starts"]
        successList = []
        resultList = []
        for startIndex in dataList:
            startTime = time.time()
            z0 = np.array(startsA[startIndex], dtype=np.float64)
            try:
                rec = self.__runStart(startIndex, z0)
            except Exception as e:
                logger.warning("%s start %d failing with %s", procName, startIndex, str(e))
                rec = StartRecord(startIndex, math.inf, False, math.inf, 0.5 * float(np.dot(z0, z0)), 0, str(e), z0)
            if self.__verbose:
                logger.info("%s start %d value %.10g converged %r (%.2f seconds)", procName, startIndex, rec.value, rec.converged, time.time() - startTime)
            resultList.append(rec)
            successList.append(startIndex)
        return successList, resultList, []


def selectBest(recordList):
    """Smallest value over converged starts (all starts if none converged); near ties go to the smaller energy."""
    poolL = [rec for rec in recordList if rec.converged] or [rec for rec in recordList if math.isfinite(rec.value)] or list(recordList)
    best = None
    for rec in sorted(poolL, key=lambda r: r.startIndex):
        if best is None or rec.value < best.value - TIE_TOLERANCE:
            best = rec
        elif abs(rec.value - best.value) <= TIE_TOLERANCE and rec.energy < best.energy:
            best = rec
    return best


class MultiStartOptimizer(object):
    def __init__(self, config, verbose=False):
        """Multi-start driver.

        Args:
            config (OptimizerConfig): optimizer settings
            verbose (bool, optional): log every start. Defaults to False.
        """
        self.__cfg = config
        self.__verbose = verbose

    def buildStarts(self, problem, extraStarts=None):
        """Zero start, any supplied feasible starts, then nStarts - 1 random starts."""
        cfg = self.__cfg
        d = problem.dim
        bounds = getattr(problem, "bounds", None)
        startL = [clipToBounds(np.zeros(d), bounds)]
        for z in extraStarts or []:
            startL.append(clipToBounds(np.asarray(z, dtype=np.float64), bounds))
        gen = counterGenerator(cfg.seed, STREAM_OPTIMIZER, d)
        for _ in range(cfg.nStarts - 1):
            startL.append(clipToBounds(cfg.startScale * problem.zScale * gen.standard_normal(d), bounds))
        return np.array(startL)

    def minimize(self, problem, extraStarts=None, starts=None):
        """Run all starts and reduce them.

        Args:
            problem (object): exposes dim, zScale, evaluateBatch(zA) and optionally bounds
            extraStarts (list, optional): additional starts placed after the zero start
            starts (array, optional): explicit start matrix replacing the default set

        Returns:
            MultiStartResult: best record and all records ordered by start index
        """
        cfg = self.__cfg
        startsA = np.atleast_2d(starts) if starts is not None else self.buildStarts(problem, extraStarts=extraStarts)
        indexL = list(range(startsA.shape[0]))
        worker = MultiStartWorker(problem, cfg, verbose=self.__verbose)
        optionsD = {"starts": startsA}
        startTime = time.time()
        if cfg.numProc <= 1 or len(indexL) < 2:
            _, recordList, _ = worker.optimize(indexL, "main", optionsD, None)
        else:
            mpu = MultiProcUtil(verbose=self.__verbose)
            mpu.setWorkingDir(".")
            mpu.setOptions(optionsD=optionsD)
            mpu.set(workerObj=worker, workerMethod="optimize")
            ok, failList, rL, _ = mpu.runMulti(dataList=indexL, numProc=min(cfg.numProc, len(indexL)), numResults=1, chunkSize=1)
            logger.debug("Start pool ended with status %r failures %r", ok, len(failList))
            recordList = list(rL[0])
            doneS = {rec.startIndex for rec in recordList}
            for startIndex in indexL:
                if startIndex not in doneS:
                    z0 = startsA[startIndex]
                    recordList.append(StartRecord(startIndex, math.inf, False, math.inf, 0.5 * float(np.dot(z0, z0)), 0, "worker failure", z0))
        recordList = sorted(recordList, key=lambda r: r.startIndex)
        best = selectBest(recordList)
        logger.debug("Multi-start (%d starts) best value %.12g converged %d (%.2f seconds)", len(recordList), best.value, sum(r.converged for r in recordList), time.time() - startTime)
        return MultiStartResult(best, recordList)
