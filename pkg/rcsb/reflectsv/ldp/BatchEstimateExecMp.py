##
# File:    BatchEstimateExecMp.py
# Author:  J. Westbrook
# Date:    15-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Multiprocessing wrapper for Monte Carlo estimation of path statistics over replica blocks -

"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

# pylint: disable=redefined-outer-name

import logging
import math
import platform
import resource
import time
from collections import namedtuple

import numpy as np

from rcsb.utils.multiproc.MultiProcUtil import MultiProcUtil
from rcsb.reflectsv.ldp.NoiseGenerator import NoiseGenerator
from rcsb.reflectsv.ldp.ReflectSvErrors import NumericalFailure, ReplicaAbortError, ValidationError
from rcsb.reflectsv.ldp.VolatilitySimulator import checkStatistic, evaluateStatistic, simulateLogPriceBatch

logger = logging.getLogger(__name__)

MCEstimate = namedtuple("MCEstimate", "mean stderr nReplicas seed eps aborted statistic")
ReplicaValues = namedtuple("ReplicaValues", "values aborted seed eps statistic")


def logUsage(procName, message, startTime):
    unitS = "MB" if platform.system() == "Darwin" else "GB"
    rusageMax = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    deltaTime = time.time() - startTime
    logger.info("%s %s at %s (%.4f seconds) (%.4f %s)", procName, message, time.strftime("%Y %m %d %H:%M:%S", time.localtime()), deltaTime, rusageMax / 10 ** 6, unitS)


def replicaBlocks(nReplicas, blockSize):
    """Block descriptors (blockId, replicaStart, count); boundaries depend only on the arguments."""
    blockSize = max(1, int(blockSize))
    return [(ii, start, min(blockSize, nReplicas - start)) for ii, start in enumerate(range(0, nReplicas, blockSize))]


def summarizeValues(values, seed, eps, statistic, aborted=0):
    """Mean and standard error with pairwise summation over replica-ordered values."""
    vA = np.asarray(values, dtype=np.float64)
    nV = vA.shape[0]
    if nV < 1:
        raise ReplicaAbortError("No replicas left to estimate %s (aborted %d)" % (statistic, aborted))
    mean = float(np.sum(vA) / nV)
    if nV > 1:
        dev = vA - mean
        stderr = math.sqrt(float(np.sum(dev * dev)) / (nV - 1) / nV)
    else:
        stderr = float("nan")
    return MCEstimate(mean, stderr, nV, seed, eps, int(aborted), statistic)


class BatchEstimateWorker(object):
    def __init__(self, verbose=True):
        self.__verbose = verbose

    def simulate(self, dataList, procName, optionsD, workingDir):
        """Worker method to simulate replica blocks and evaluate a path statistic.

        Args:
            dataList (list): list of replica block tuples (blockId, replicaStart, count)
            procName (str): processName
            optionsD (dict): dictionary of options
            workingDir (str): path to working directory (not used)

        Returns:
            (successList, resultList, []): success list of blocks and per-block result dictionaries
        """
        _ = workingDir
        successList = []
        resultList = []
        startTime = time.time()
        try:
            spec = optionsD["spec"]
            grid = optionsD["grid"]
            eps = optionsD["eps"]
            statistic = optionsD["statistic"]
            paramD = optionsD["statisticParams"]
            nG = NoiseGenerator(optionsD["seed"])
            logger.debug("%s starting with %d blocks at %s", procName, len(dataList), time.strftime("%Y %m %d %H:%M:%S", time.localtime()))
            for blockId, replicaStart, count in dataList:
                dW, dB = nG.generateBlock(grid, replicaStart, count)
                bt = simulateLogPriceBatch(spec, eps, grid, dW, dB)
                vA = evaluateStatistic(statistic, spec, eps, bt, paramD)
                bad = bt.aborted | ~np.isfinite(vA)
                if np.any(bad):
                    logger.warning("%s block %d aborted %d replicas (first replica %d)", procName, blockId, int(np.sum(bad)), replicaStart + int(np.argmax(bad)))
                resultList.append({"blockId": blockId, "values": vA, "aborted": bad})
                successList.append((blockId, replicaStart, count))
        except Exception as e:
            logger.exception("%s failing with %s", procName, str(e))
        if self.__verbose:
            logUsage(procName, "completed %d blocks" % len(successList), startTime)
        return successList, resultList, []


class BatchEstimateExecMp(object):
    def __init__(self, spec, grid, workPath=".", verbose=True):
        """MP execution wrapper for replica-block Monte Carlo estimates.

        Args:
            spec (ModelSpec): model
            grid (TimeGrid): simulation grid (horizon must match the model)
            workPath (str, optional): working directory for worker processes. Defaults to ".".
        """
        self.__workPath = workPath
        if grid.T != spec.T:
            raise ValidationError("Grid horizon %r does not match model horizon %r" % (grid.T, spec.T))
        self.__spec = spec
        self.__grid = grid
        self.__verbose = verbose

    def replicaValues(self, eps, nReplicas, seed, statistic, statisticParams=None, numProc=1, blockSize=2000):
        """Per-replica statistic values in replica order, aborted replicas removed.

        Args:
            eps (float): noise scale
            nReplicas (int): number of replicas (>= 2)
            seed (int): run seed
            statistic (str): statistic registry name
            statisticParams (dict, optional): statistic parameters
            numProc (int, optional): worker processes, <= 1 runs in-process. Defaults to 1.
            blockSize (int, optional): replicas per work item. Defaults to 2000.

        Returns:
            ReplicaValues: values, aborted count and run identifiers
        """
        if int(nReplicas) < 2:
            raise ValidationError("At least two replicas are required, got %r" % nReplicas)
        if not 0.0 < float(eps) <= 1.0:
            raise ValidationError("Noise scale eps must lie in (0, 1], got %r" % eps)
        checkStatistic(statistic, statisticParams or {})
        nReplicas = int(nReplicas)
        blockList = replicaBlocks(nReplicas, blockSize)
        optionsD = {"spec": self.__spec, "grid": self.__grid, "eps": float(eps), "seed": int(seed), "statistic": statistic, "statisticParams": statisticParams or {}}
        startTime = time.time()
        worker = BatchEstimateWorker(verbose=self.__verbose)
        if numProc is None or int(numProc) <= 1:
            successList, resultList, _ = worker.simulate(blockList, "main", optionsD, None)
            failList = [blk for blk in blockList if blk not in successList]
        else:
            mpu = MultiProcUtil(verbose=self.__verbose)
            mpu.setWorkingDir(self.__workPath)
            mpu.setOptions(optionsD=optionsD)
            mpu.set(workerObj=worker, workerMethod="simulate")
            chunkSize = max(1, len(blockList) // (4 * int(numProc)))
            ok, failList, rL, _ = mpu.runMulti(dataList=blockList, numProc=int(numProc), numResults=1, chunkSize=chunkSize)
            logger.debug("Run ended with status %r failures %r", ok, len(failList))
            resultList = rL[0]
        if failList:
            raise NumericalFailure("Simulation failed for %d of %d replica blocks" % (len(failList), len(blockList)))
        resultList = sorted(resultList, key=lambda rD: rD["blockId"])
        vA = np.concatenate([rD["values"] for rD in resultList])
        badA = np.concatenate([rD["aborted"] for rD in resultList])
        nAborted = int(np.sum(badA))
        if self.__verbose:
            logger.info("%s eps %r replicas %d aborted %d (%.2f seconds)", statistic, eps, nReplicas, nAborted, time.time() - startTime)
        return ReplicaValues(vA[~badA], nAborted, int(seed), float(eps), statistic)

    def estimate(self, eps, nReplicas, seed, statistic, statisticParams=None, numProc=1, blockSize=2000):
        """Mean and standard error of a path statistic; see replicaValues() for arguments.

        Returns:
            MCEstimate: estimate with the count of aborted replicas
        """
        rv = self.replicaValues(eps, nReplicas, seed, statistic, statisticParams=statisticParams, numProc=numProc, blockSize=blockSize)
        return summarizeValues(rv.values, rv.seed, rv.eps, rv.statistic, aborted=rv.aborted)
