##
# File:    OptionPricing.py
# Author:  J. Westbrook
# Date:    17-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Option pricing layer: finite-eps Monte Carlo prices, large deviation reports comparing
the decay of simulated prices with the variational rates, and the martingale check
for the discounted asset price.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import math
import time

import numpy as np
from scipy import stats

from rcsb.reflectsv.ldp.BatchEstimateExecMp import BatchEstimateExecMp, summarizeValues
from rcsb.reflectsv.ldp.PathUtils import TimeGrid
from rcsb.reflectsv.ldp.RateFunction import BarrierSet, itilde, qtildePathsetInf
from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)

OPTION_KINDS = ("binary_up_in", "binary_up_out", "binary_down_in", "binary_down_out", "digital_call", "vanilla_call")
DEFAULT_LADDER = (0.4, 0.3, 0.2, 0.15, 0.1)
DEFAULT_REPLICAS = 400000
CALL_GRID_POINTS = 64
# power of eps in the price prefactor, C eps^beta exp(-I / eps), removed before the slope fit
PREFACTOR_EXPONENTS = {"binary_up_in": 0.5, "binary_down_in": 0.5, "binary_up_out": 0.0, "binary_down_out": 0.0, "digital_call": 0.5, "vanilla_call": 1.5}


class OptionSpec(object):
    def __init__(self, kind, K, G=1.0):
        if kind not in OPTION_KINDS:
            raise ValidationError("Unknown option kind %r (expected one of %s)" % (kind, ", ".join(OPTION_KINDS)))
        if not K > 0.0:
            raise ValidationError("Strike or barrier K must be positive, got %r" % K)
        if not G > 0.0:
            raise ValidationError("Binary cash amount G must be positive, got %r" % G)
        self.kind = kind
        self.K = float(K)
        self.G = float(G)

    def isBinary(self):
        return self.kind.startswith("binary_")

    def barrierSet(self):
        if not self.isBinary():
            raise ValidationError("Option kind %s has no barrier set" % self.kind)
        return BarrierSet(self.kind[len("binary_") :], self.K)

    def checkSide(self, spec):
        if self.kind.startswith("binary_up") and not spec.s0 < self.K:
            raise ValidationError("Up-type binary requires s0 < K (s0=%r, K=%r)" % (spec.s0, self.K))
        if self.kind.startswith("binary_down") and not self.K < spec.s0:
            raise ValidationError("Down-type binary requires K < s0 (s0=%r, K=%r)" % (spec.s0, self.K))

    def payoffScale(self, spec):
        """Discounted cash amount; dividing by it leaves the probability for binaries and digitals."""
        if self.kind == "vanilla_call":
            return 1.0
        return self.G * math.exp(-spec.r * spec.T)

    def prefactorExponent(self):
        return PREFACTOR_EXPONENTS[self.kind]

    def toDict(self):
        return {"kind": self.kind, "K": self.K, "G": self.G}


class LdpReport(object):
    """Simulated decay of a normalized price against the variational rate."""

    def __init__(self, option, epsLadder, mcPoints, extrapolatedSlope, variationalValue, relativeGap, censored, rateResult=None, extraD=None):
        self.option = option
        self.epsLadder = list(epsLadder)
        self.mcPoints = mcPoints
        self.extrapolatedSlope = extrapolatedSlope
        self.variationalValue = variationalValue
        self.relativeGap = relativeGap
        self.censored = censored
        self.rateResult = rateResult
        self.extraD = extraD or {}

    @property
    def mcLogPrices(self):
        return [pt["eps_log_p"] for pt in self.mcPoints]

    @property
    def stderrBand(self):
        return [(pt["band_lo"], pt["band_hi"]) for pt in self.mcPoints]

    def toDict(self):
        rD = {
            "option": self.option.toDict(),
            "eps_ladder": self.epsLadder,
            "mc_points": [{ky: pt[ky] for ky in ("eps", "p_hat", "stderr", "eps_log_p")} for pt in self.mcPoints],
            "slope": self.extrapolatedSlope,
            "variational_value": self.variationalValue,
            "relative_gap": self.relativeGap,
            "censored": self.censored,
        }
        if self.rateResult is not None:
            rD["rate"] = self.rateResult.toDict()
        rD.update(self.extraD)
        return rD

    def plotRows(self):
        return [
            {"eps": pt["eps"], "eps_log_p": pt["eps_log_p"], "band_lo": pt["band_lo"], "band_hi": pt["band_hi"], "variational_value": self.variationalValue}
            for pt in self.mcPoints
            if pt["eps_log_p"] is not None
        ]


def _requireRiskNeutral(spec):
    if not spec.isRiskNeutral():
        raise ValidationError("Pricing requires the risk-neutral drift b = r (drift %r, r %r)" % (spec.coefficients.driftRate(), spec.r))


def _checkLadder(epsLadder):
    ladder = [float(e) for e in epsLadder]
    if not ladder or any(not 0.0 < e <= 1.0 for e in ladder):
        raise ValidationError("Ladder values must lie in (0, 1], got %r" % (ladder,))
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValidationError("Ladder must be strictly decreasing, got %r" % (ladder,))
    return ladder


def mcOptionPrice(spec, opt, eps, nReplicas, seed, grid=None, numProc=1, blockSize=2000):
    """Discounted payoff mean with standard error.

    Args:
        spec (ModelSpec): risk-neutral model
        opt (OptionSpec): option
        eps (float): noise scale
        nReplicas (int): replicas
        seed (int): run seed
        grid (TimeGrid, optional): simulation grid. Defaults to 100 steps.
        numProc (int, optional): worker processes. Defaults to 1.

    Returns:
        MCEstimate: price estimate
    """
    _requireRiskNeutral(spec)
    opt.checkSide(spec)
    grid = grid or TimeGrid(spec.T, 100)
    bex = BatchEstimateExecMp(spec, grid, verbose=False)
    return bex.estimate(eps, nReplicas, seed, "discounted_payoff", statisticParams=opt.toDict(), numProc=numProc, blockSize=blockSize)


def extrapolateSlope(epsList, pHatList, stderrList, prefactorExponent=0.0):
    """Weighted least squares of eps log p against eps; returns (intercept, points, censored).

    Weights come from the delta-method standard error eps * se / p of eps log p.  With a
    prefactor exponent beta the fitted values are eps log p - beta eps log eps, which removes
    the eps^beta factor of C eps^beta exp(-I / eps) that a straight line cannot follow.
    The reported points keep the raw eps log p.

    Args:
        epsList (list): noise scales
        pHatList (list): normalized price estimates
        stderrList (list): standard errors of pHatList
        prefactorExponent (float, optional): beta. Defaults to 0.0 (plain linear fit).

    Returns:
        (float, list, list): intercept (None when every point is censored), points, censored eps
    """
    pointL = []
    censoredL = []
    for eps, pHat, se in zip(epsList, pHatList, stderrList):
        if pHat > 0.0:
            yV = eps * math.log(pHat)
            sY = eps * se / pHat
            pointL.append({"eps": eps, "p_hat": pHat, "stderr": se, "eps_log_p": yV, "sigma": sY, "band_lo": yV - 2.0 * sY, "band_hi": yV + 2.0 * sY})
        else:
            censoredL.append(eps)
            pointL.append({"eps": eps, "p_hat": pHat, "stderr": se, "eps_log_p": None, "sigma": None, "band_lo": None, "band_hi": None})
    usedL = [pt for pt in pointL if pt["eps_log_p"] is not None]
    if not usedL:
        return None, pointL, censoredL
    xA = np.array([pt["eps"] for pt in usedL])
    if len(usedL) == 1:
        return usedL[0]["eps_log_p"] - prefactorExponent * float(xA[0] * np.log(xA[0])), pointL, censoredL
    yA = np.array([pt["eps_log_p"] for pt in usedL]) - prefactorExponent * xA * np.log(xA)
    wA = 1.0 / np.maximum(np.array([pt["sigma"] for pt in usedL]) ** 2, 1.0e-24)
    design = np.vstack((np.ones_like(xA), xA)).T
    coef = np.linalg.solve(design.T @ (wA[:, np.newaxis] * design), design.T @ (wA * yA))
    return float(coef[0]), pointL, censoredL


def relativeGap(slope, variationalValue):
    """|slope + v| / v, or the absolute gap when the rate is zero."""
    if slope is None or not math.isfinite(variationalValue):
        return None
    gap = abs(slope + variationalValue)
    return gap / variationalValue if variationalValue > 1.0e-12 else gap


def _mcLadder(spec, opt, ladder, nReplicas, seed, grid, numProc):
    pHatL, seL = [], []
    scale = opt.payoffScale(spec)
    for eps in ladder:
        est = mcOptionPrice(spec, opt, eps, nReplicas, seed, grid=grid, numProc=numProc)
        pHatL.append(est.mean / scale)
        seL.append(est.stderr / scale)
        logger.info("%s eps %.4g normalized price %.6g (stderr %.3g, aborted %d)", opt.kind, eps, est.mean / scale, est.stderr / scale, est.aborted)
    return pHatL, seL


def barrierLdpReport(spec, opt, epsLadder=DEFAULT_LADDER, nReplicas=DEFAULT_REPLICAS, seed=0, optCfg=None, grid=None, numProc=1):
    """Simulated eps log V_k against minus the barrier-set infimum of the path rate.

    Args:
        spec (ModelSpec): risk-neutral model with strictly positive sigma
        opt (OptionSpec): binary barrier option
        epsLadder (list, optional): decreasing noise scales
        nReplicas (int, optional): replicas per ladder entry
        seed (int, optional): run seed
        optCfg (OptimizerConfig, optional): optimizer settings
        grid (TimeGrid, optional): shared simulation and control grid
        numProc (int, optional): worker processes

    Returns:
        LdpReport: report
    """
    if not opt.isBinary():
        raise ValidationError("Barrier report requires a binary barrier option, got %s" % opt.kind)
    if not spec.coefficients.sigmaStrictlyPositive:
        raise ValidationError("Barrier report requires a strictly positive volatility map (family %s)" % spec.coefficients.family)
    _requireRiskNeutral(spec)
    opt.checkSide(spec)
    ladder = _checkLadder(epsLadder)
    grid = grid or TimeGrid(spec.T, 100)
    startTime = time.time()
    pHatL, seL = _mcLadder(spec, opt, ladder, nReplicas, seed, grid, numProc)
    slope, pointL, censoredL = extrapolateSlope(ladder, pHatL, seL, prefactorExponent=opt.prefactorExponent())
    rateResult = qtildePathsetInf(spec, opt.barrierSet(), optCfg, grid=grid)
    gap = relativeGap(slope, rateResult.value)
    logger.info("%s slope %r variational %.6g gap %r (%.2f seconds)", opt.kind, slope, rateResult.value, gap, time.time() - startTime)
    return LdpReport(opt, ladder, pointL, slope, rateResult.value, gap, censoredL, rateResult=rateResult, extraD={"prefactor_exponent": opt.prefactorExponent()})


def halfLineInfimum(spec, lower, optCfg=None, grid=None, nPoints=CALL_GRID_POINTS):
    """Minimum of itilde over an x-grid on [lower, lower + 5 sigmaHat sqrt(T)].

    Returns:
        (float, list): infimum and the evaluated (x, RateResult) pairs
    """
    cs = spec.coefficients
    dyn = cs.volDynamics or cs
    pD = dyn.params
    if cs.family == "constant_vol":
        sigmaHat = pD["sigma0"]
    elif dyn.family == "reflected_ou":
        sigmaHat = pD["m"] + spec.y0 + pD["xi"] * math.sqrt(spec.T)
    else:
        sigmaHat = spec.y0 + pD["a"] * spec.T + pD["xi"] * math.sqrt(spec.T)
    if cs.family == "exponential_vol":
        sigmaHat = math.exp(sigmaHat - cs.params["k"])
    sigmaHat = float(sigmaHat)
    xA = np.linspace(lower, lower + 5.0 * sigmaHat * math.sqrt(spec.T), int(nPoints))
    evalL = []
    best = math.inf
    for x in xA:
        res = itilde(spec, float(x), optCfg, grid=grid)
        evalL.append((float(x), res))
        best = min(best, res.value)
    return best, evalL


def _halfLineReport(spec, opt, ladder, nReplicas, seed, optCfg, grid, numProc, nPoints):
    startTime = time.time()
    pHatL, seL = _mcLadder(spec, opt, ladder, nReplicas, seed, grid, numProc)
    slope, pointL, censoredL = extrapolateSlope(ladder, pHatL, seL, prefactorExponent=opt.prefactorExponent())
    lower = math.log(opt.K) - spec.x0
    value, evalL = halfLineInfimum(spec, lower, optCfg=optCfg, grid=grid, nPoints=nPoints)
    argBest = min(evalL, key=lambda pr: pr[1].value)
    branchD = {}
    for _, res in evalL:
        for ky, v in res.branchValues.items():
            branchD[ky] = min(branchD.get(ky, math.inf), v)
    extraD = {
        "x_grid": [x for x, _ in evalL],
        "itilde_values": [None if res.infinite else res.value for _, res in evalL],
        "argmin_x": argBest[0],
        "prefactor_exponent": opt.prefactorExponent(),
        "branch_values": {ky: (v if math.isfinite(v) else None) for ky, v in branchD.items()},
    }
    if spec.y0 == 0.0 and spec.coefficients.family in ("reflected_ou", "reflected_bm_drift"):
        # report the degenerate branch even though it sits at x = mu T, outside the set
        zeroX = spec.coefficients.driftRate() * spec.T
        extraD["degenerate_branch"] = {"x": zeroX, "value": itilde(spec, zeroX, optCfg, grid=grid).branchValues.get("L1")}
    gap = relativeGap(slope, value)
    logger.info("%s K %.6g slope %r variational %.6g gap %r (%.2f seconds)", opt.kind, opt.K, slope, value, gap, time.time() - startTime)
    return LdpReport(opt, ladder, pointL, slope, value, gap, censoredL, rateResult=argBest[1], extraD=extraD)


def callLdpReport(spec, K, epsLadder=DEFAULT_LADDER, nReplicas=DEFAULT_REPLICAS, seed=0, optCfg=None, grid=None, numProc=1, nPoints=CALL_GRID_POINTS):
    """Simulated eps log C against minus the infimum of itilde over x >= log K - x0.

    Args:
        spec (ModelSpec): risk-neutral reflected_ou model (constant_vol accepted as an oracle run)
        K (float): strike
        nPoints (int, optional): x-grid size. Defaults to 64.

    Returns:
        LdpReport: report
    """
    fam = spec.coefficients.family
    if fam not in ("reflected_ou", "constant_vol"):
        raise ValidationError("Call asymptotics cover the reflected_ou family (constant_vol as oracle), got %s" % fam)
    _requireRiskNeutral(spec)
    if fam == "reflected_ou" and spec.y0 == 0.0 and not K > spec.s0 * math.exp(spec.r * spec.T):
        raise ValidationError("With y0 = 0 the call must be out of the money, K > s0 exp(rT)")
    opt = OptionSpec("vanilla_call", K)
    ladder = _checkLadder(epsLadder)
    grid = grid or TimeGrid(spec.T, 100)
    return _halfLineReport(spec, opt, ladder, nReplicas, seed, optCfg, grid, numProc, nPoints)


def digitalLdpReport(spec, K, epsLadder=DEFAULT_LADDER, nReplicas=DEFAULT_REPLICAS, seed=0, optCfg=None, grid=None, numProc=1, nPoints=CALL_GRID_POINTS, G=1.0):
    """Terminal-set counterpart of callLdpReport() for the digital call {X_T - x0 > log K - x0}."""
    _requireRiskNeutral(spec)
    if not K > spec.s0 * math.exp(spec.r * spec.T) and spec.y0 == 0.0:
        raise ValidationError("With y0 = 0 the digital must be out of the money, K > s0 exp(rT)")
    opt = OptionSpec("digital_call", K, G=G)
    ladder = _checkLadder(epsLadder)
    grid = grid or TimeGrid(spec.T, 100)
    return _halfLineReport(spec, opt, ladder, nReplicas, seed, optCfg, grid, numProc, nPoints)


class MartingaleReport(object):
    def __init__(self, estimate, s0, passed, supermartingaleOk, tested, expMomentD):
        self.estimate = estimate
        self.s0 = s0
        self.passed = passed
        self.supermartingaleOk = supermartingaleOk
        self.tested = tested
        self.expMomentD = expMomentD

    def toDict(self):
        est = self.estimate
        return {
            "mean": est.mean,
            "stderr": est.stderr,
            "n": est.nReplicas,
            "aborted": est.aborted,
            "seed": est.seed,
            "s0": self.s0,
            "martingale_tested": self.tested,
            "passed": self.passed,
            "supermartingale_ok": self.supermartingaleOk,
            "exp_moment": self.expMomentD,
        }


def expMomentAlpha(spec):
    """alpha = 1 / (16 xi^2 exp(4 q T) T) for reflected OU dynamics."""
    pD = spec.coefficients.params
    return 1.0 / (16.0 * pD["xi"] ** 2 * math.exp(4.0 * pD["q"] * spec.T) * spec.T)


def martingaleCheck(spec, nReplicas, seed, grid=None, numProc=1):
    """Discounted terminal price against s0 at eps = 1.

    The two-sided test |mean - s0| <= 3 stderr applies to reflected_ou and constant_vol;
    other families get the one-sided supermartingale guard only. For reflected OU the
    exponential moment E exp(alpha max Y^2) is also estimated on two half samples.

    Args:
        spec (ModelSpec): risk-neutral model
        nReplicas (int): replicas
        seed (int): run seed
        grid (TimeGrid, optional): simulation grid. Defaults to 100 steps.
        numProc (int, optional): worker processes

    Returns:
        MartingaleReport: estimate, pass flags and exponential-moment diagnostic
    """
    _requireRiskNeutral(spec)
    grid = grid or TimeGrid(spec.T, 100)
    bex = BatchEstimateExecMp(spec, grid, verbose=False)
    est = bex.estimate(1.0, nReplicas, seed, "discounted_price", numProc=numProc)
    fam = spec.coefficients.family
    tested = fam in ("reflected_ou", "constant_vol")
    dev = est.mean - spec.s0
    superOk = dev <= 3.0 * est.stderr or abs(dev) <= 1.0e-12 * spec.s0
    passed = (abs(dev) <= 3.0 * est.stderr or abs(dev) <= 1.0e-12 * spec.s0) if tested else None
    expD = {}
    if fam == "reflected_ou":
        alpha = expMomentAlpha(spec)
        rv = bex.replicaValues(1.0, nReplicas, seed, "exp_moment", statisticParams={"alpha": alpha}, numProc=numProc)
        half = len(rv.values) // 2
        estA = summarizeValues(rv.values[:half], seed, 1.0, "exp_moment")
        estB = summarizeValues(rv.values[half:], seed, 1.0, "exp_moment")
        combined = math.sqrt(estA.stderr ** 2 + estB.stderr ** 2)
        finite = bool(np.all(np.isfinite(rv.values)))
        expD = {
            "alpha": alpha,
            "half_a": estA.mean,
            "half_b": estB.mean,
            "combined_stderr": combined,
            "stable": finite and abs(estA.mean - estB.mean) <= 4.0 * combined + 1.0e-12,
        }
    logger.info("Discounted mean %.8g (stderr %.3g) s0 %.6g passed %r supermartingale %r", est.mean, est.stderr, spec.s0, passed, superOk)
    return MartingaleReport(est, spec.s0, passed, superOk, tested, expD)


def blackScholesCall(s0, K, r, sigma, T):
    sqT = sigma * math.sqrt(T)
    d1 = (math.log(s0 / K) + (r + 0.5 * sigma * sigma) * T) / sqT
    return s0 * stats.norm.cdf(d1) - K * math.exp(-r * T) * stats.norm.cdf(d1 - sqT)


def blackScholesDigitalCall(s0, K, r, sigma, T, G=1.0):
    sqT = sigma * math.sqrt(T)
    d2 = (math.log(s0 / K) + (r - 0.5 * sigma * sigma) * T) / sqT
    return G * math.exp(-r * T) * stats.norm.cdf(d2)


def brownianHittingProbability(level, sigma0, eps, T):
    """P(max sqrt(eps) sigma0 B_t >= |level|) = 2 (1 - N(|level| / (sigma0 sqrt(eps T))))."""
    return 2.0 * stats.norm.sf(abs(level) / (sigma0 * math.sqrt(eps * T)))
