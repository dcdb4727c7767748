##
# File:    VolatilitySimulator.py
# Author:  J. Westbrook
# Date:    15-Oct-2026
# Version: 0.001
#
# Updated:
#  17-Oct-2026 jdw add |OU| and |drifted BM| baselines and path statistics registry
#
##
"""
Euler simulation of the unconstrained process U, the reflected volatility Y = Gamma U
and the scaled log-price X, vectorized over replica blocks.

The reflection is applied incrementally by carrying the running minimum of U, and the
coefficients are evaluated at the reflected state.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import math
from collections import namedtuple

import numpy as np
from scipy import stats

from rcsb.reflectsv.ldp.PathUtils import Path
from rcsb.reflectsv.ldp.ReflectSvErrors import ReplicaAbortError, ValidationError

logger = logging.getLogger(__name__)

SimulatedTriple = namedtuple("SimulatedTriple", "U Y X")
BatchTriple = namedtuple("BatchTriple", "U Y X aborted abortStep")
KsResult = namedtuple("KsResult", "statistic pValue reject level")


def _checkEps(eps):
    if not 0.0 < eps <= 1.0:
        raise ValidationError("Noise scale eps must lie in (0, 1], got %r" % eps)


def _abortInfo(aA):
    finA = np.isfinite(aA)
    aborted = ~np.all(finA, axis=1)
    abortStep = np.where(aborted, np.argmin(finA, axis=1), -1)
    return aborted, abortStep


def simulateVolatilityBatch(spec, eps, grid, dB):
    """Reflected Euler recursion for a block of replicas.

    Args:
        spec (ModelSpec): model
        eps (float): noise scale in (0, 1]
        grid (TimeGrid): time grid
        dB (array): (nRep, nSteps) volatility noise increments

    Returns:
        (U, Y, aborted, abortStep): node arrays (nRep, nSteps + 1), abort mask and first bad node
    """
    _checkEps(eps)
    cs = spec.coefficients
    dB = np.atleast_2d(dB)
    nRep, nSteps = dB.shape
    if nSteps != grid.nSteps:
        raise ValidationError("Noise holds %d steps but the grid has %d" % (nSteps, grid.nSteps))
    dt = grid.dt
    sqEps = math.sqrt(eps)
    tA = grid.nodes()
    uA = np.empty((nRep, nSteps + 1))
    yA = np.empty((nRep, nSteps + 1))
    uA[:, 0] = spec.y0
    runMin = np.minimum(uA[:, 0], 0.0)
    yA[:, 0] = uA[:, 0] - runMin
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(nSteps):
            yk = yA[:, k]
            uA[:, k + 1] = uA[:, k] + cs.a(tA[k], yk) * dt + sqEps * cs.c(tA[k], yk) * dB[:, k]
            runMin = np.minimum(runMin, np.minimum(uA[:, k + 1], 0.0))
            yA[:, k + 1] = uA[:, k + 1] - runMin
    aborted, abortStep = _abortInfo(uA)
    return uA, yA, aborted, abortStep


def simulateLogPriceBatch(spec, eps, grid, dW, dB):
    """Log-price recursion driven by the reflected volatility of the same replicas.

    Returns:
        BatchTriple: U, Y, X node arrays with abort mask and first non-finite node per replica
    """
    uA, yA, aborted, abortStep = simulateVolatilityBatch(spec, eps, grid, dB)
    cs = spec.coefficients
    dW = np.atleast_2d(dW)
    dB = np.atleast_2d(dB)
    nRep, nSteps = dB.shape
    dt = grid.dt
    sqEps = math.sqrt(eps)
    rho, rhoBar = spec.rho, spec.rhoBar
    tA = grid.nodes()
    xA = np.empty((nRep, nSteps + 1))
    xA[:, 0] = spec.x0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(nSteps):
            yk = yA[:, k]
            sk = cs.sigma(tA[k], yk)
            xA[:, k + 1] = xA[:, k] + cs.b(tA[k], yk) * dt - 0.5 * eps * sk * sk * dt + sqEps * sk * (rhoBar * dW[:, k] + rho * dB[:, k])
    xAborted, xStep = _abortInfo(xA)
    abortStep = np.where(aborted, abortStep, xStep)
    return BatchTriple(uA, yA, xA, aborted | xAborted, abortStep)


def simulateVolatility(spec, eps, noise):
    """Single replica of (U, Y) driven by noise.dB.

    Args:
        spec (ModelSpec): model
        eps (float): noise scale in (0, 1]
        noise (NoiseBundle): replica increments

    Returns:
        (Path, Path): U and Y = Gamma U
    """
    if noise.grid.T != spec.T:
        raise ValidationError("Noise grid horizon %r does not match model horizon %r" % (noise.grid.T, spec.T))
    uA, yA, aborted, abortStep = simulateVolatilityBatch(spec, eps, noise.grid, noise.dB[np.newaxis, :])
    if aborted[0]:
        raise ReplicaAbortError("Non-finite volatility state at node %d (replica %d)" % (abortStep[0], noise.replicaIndex), stepIndex=int(abortStep[0]), replicaIndex=noise.replicaIndex)
    return Path(noise.grid, uA[0]), Path(noise.grid, yA[0])


def simulateLogPrice(spec, eps, noise):
    if noise.grid.T != spec.T:
        raise ValidationError("Noise grid horizon %r does not match model horizon %r" % (noise.grid.T, spec.T))
    bt = simulateLogPriceBatch(spec, eps, noise.grid, noise.dW[np.newaxis, :], noise.dB[np.newaxis, :])
    if bt.aborted[0]:
        raise ReplicaAbortError("Non-finite state at node %d (replica %d)" % (bt.abortStep[0], noise.replicaIndex), stepIndex=int(bt.abortStep[0]), replicaIndex=noise.replicaIndex)
    return SimulatedTriple(Path(noise.grid, bt.U[0]), Path(noise.grid, bt.Y[0]), Path(noise.grid, bt.X[0]))


#
# Unreflected baselines
#
def ouMean(q, m, y0, t):
    tA = np.asarray(t, dtype=np.float64)
    eA = np.exp(-q * tA)
    return eA * y0 + (1.0 - eA) * m


def ouCovariance(q, xi, t, s):
    """Covariance of the OU process started from a constant; q = 0 gives xi^2 min(t, s)."""
    tA = np.asarray(t, dtype=np.float64)
    sA = np.asarray(s, dtype=np.float64)
    if q == 0.0:
        return xi * xi * np.minimum(tA, sA)
    return xi * xi / (2.0 * q) * (np.exp(-q * np.abs(tA - sA)) - np.exp(-q * (tA + sA)))


def simulateOuBatch(q, m, xi, y0, grid, normals, eps=1.0):
    """OU paths from the exact Gaussian transition on the grid nodes.

    Args:
        normals (array): (nRep, nSteps) standard normal draws

    Returns:
        array: (nRep, nSteps + 1) OU node values
    """
    normals = np.atleast_2d(normals)
    dt = grid.dt
    if q == 0.0:
        decay, sd = 1.0, math.sqrt(dt)
    else:
        decay = math.exp(-q * dt)
        sd = math.sqrt((1.0 - math.exp(-2.0 * q * dt)) / (2.0 * q))
    sd *= xi * math.sqrt(eps)
    zA = np.empty((normals.shape[0], grid.nSteps + 1))
    zA[:, 0] = y0
    for k in range(grid.nSteps):
        zA[:, k + 1] = decay * zA[:, k] + (1.0 - decay) * m + sd * normals[:, k]
    return zA


def simulateAbsOu(q, m, xi, y0, grid, normals, eps=1.0):
    """|OU| baseline node values."""
    return np.abs(simulateOuBatch(q, m, xi, y0, grid, normals, eps=eps))


def simulateAbsDriftedBm(driftA, xi, y0, grid, normals, eps=1.0):
    """|y0 + a t + sqrt(eps) xi B_t| baseline node values."""
    normals = np.atleast_2d(normals)
    bA = np.concatenate((np.zeros((normals.shape[0], 1)), np.cumsum(math.sqrt(grid.dt) * normals, axis=1)), axis=1)
    return np.abs(y0 + driftA * grid.nodes()[np.newaxis, :] + math.sqrt(eps) * xi * bA)


def equalityInLawTest(sampleA, sampleB, level=0.01):
    """Two-sample Kolmogorov-Smirnov comparison; reject when the p-value is below level."""
    ks = stats.ks_2samp(np.asarray(sampleA), np.asarray(sampleB))
    return KsResult(float(ks.statistic), float(ks.pvalue), bool(ks.pvalue < level), level)


def brownianMaxTail(y, T):
    """P(max_{t<=T} B_t >= y) = 2 (1 - N(y / sqrt(T))) for y >= 0."""
    return 2.0 * stats.norm.sf(y / math.sqrt(T))


def brownianAbsMaxTailBound(y, T):
    """Upper bound 4 (1 - N(y / sqrt(T))) of P(max_{t<=T} |B_t| > y)."""
    return 4.0 * stats.norm.sf(y / math.sqrt(T))


def gronwallBound(q, m, xi, y0, eps, tA, maxAbsB):
    """Pathwise bound on max_{s<=t} Y(s) for reflected OU given max_{s<=t} |B(s)|."""
    eA = np.exp(2.0 * q * np.asarray(tA, dtype=np.float64))
    return 2.0 * eA * y0 + m * (eA - 1.0) + 2.0 * math.sqrt(eps) * xi * eA * maxAbsB


#
# Path statistics for batch estimation: f(spec, eps, triple, paramD) -> per-replica values
#
def _statConstant(spec, eps, bt, pD):
    return np.ones(bt.X.shape[0])


def _statTerminalLogPrice(spec, eps, bt, pD):
    return bt.X[:, -1].copy()


def _statTerminalIndicator(spec, eps, bt, pD):
    dX = bt.X[:, -1] - spec.x0
    if pD.get("direction", "up") == "down":
        return (dX <= pD["level"]).astype(np.float64)
    return (dX >= pD["level"]).astype(np.float64)


def _statSupVolatility(spec, eps, bt, pD):
    return np.max(bt.Y, axis=1)


def _statSupVolatilityIndicator(spec, eps, bt, pD):
    return (np.max(bt.Y, axis=1) >= pD["level"]).astype(np.float64)


def _barrierHit(spec, bt, direction, K):
    priceA = np.exp(bt.X)
    if direction == "up":
        return np.max(priceA, axis=1) >= K
    return np.min(priceA, axis=1) <= K


def _statBarrier(spec, eps, bt, pD):
    hit = _barrierHit(spec, bt, pD.get("direction", "up"), pD["K"])
    return hit.astype(np.float64) if pD.get("knock", "in") == "in" else (~hit).astype(np.float64)


def _statDiscountedPrice(spec, eps, bt, pD):
    return math.exp(-spec.r * spec.T) * np.exp(bt.X[:, -1])


def _statDiscountedPayoff(spec, eps, bt, pD):
    kind, K, G = pD["kind"], pD["K"], pD.get("G", 1.0)
    disc = math.exp(-spec.r * spec.T)
    if kind == "vanilla_call":
        return disc * np.maximum(np.exp(bt.X[:, -1]) - K, 0.0)
    if kind == "digital_call":
        return disc * G * (np.exp(bt.X[:, -1]) > K)
    direction, knock = kind.split("_")[1:3]
    hit = _barrierHit(spec, bt, direction, K)
    return disc * G * (hit if knock == "in" else ~hit)


def _statExpMoment(spec, eps, bt, pD):
    yMax = np.max(bt.Y, axis=1)
    return np.exp(pD["alpha"] * yMax * yMax)


STATISTIC_REGISTRY = {
    "constant": _statConstant,
    "terminal_logprice": _statTerminalLogPrice,
    "terminal_indicator": _statTerminalIndicator,
    "sup_volatility": _statSupVolatility,
    "sup_volatility_indicator": _statSupVolatilityIndicator,
    "barrier": _statBarrier,
    "discounted_price": _statDiscountedPrice,
    "discounted_payoff": _statDiscountedPayoff,
    "exp_moment": _statExpMoment,
}

STATISTIC_PARAMS = {
    "terminal_indicator": ["level"],
    "sup_volatility_indicator": ["level"],
    "barrier": ["K"],
    "discounted_payoff": ["kind", "K"],
    "exp_moment": ["alpha"],
}


def checkStatistic(statistic, paramD):
    if statistic not in STATISTIC_REGISTRY:
        raise ValidationError("Unknown statistic %r (expected one of %s)" % (statistic, ", ".join(sorted(STATISTIC_REGISTRY))))
    for ky in STATISTIC_PARAMS.get(statistic, []):
        if paramD is None or paramD.get(ky) is None:
            raise ValidationError("Statistic %s requires parameter %r" % (statistic, ky))


def evaluateStatistic(statistic, spec, eps, bt, paramD=None):
    pD = paramD or {}
    checkStatistic(statistic, pD)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.asarray(STATISTIC_REGISTRY[statistic](spec, eps, bt, pD), dtype=np.float64)
