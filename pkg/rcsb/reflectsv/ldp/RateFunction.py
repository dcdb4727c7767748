##
# File:    RateFunction.py
# Author:  J. Westbrook
# Date:    16-Oct-2026
# Version: 0.001
#
# Updated:
#  17-Oct-2026 jdw closed-form elimination of the path variable for barrier hitting sets
#  18-Oct-2026 jdw add straight-line bound for the volatility supremum rate
#
##
"""
Rate functions of the small-noise large deviation principle evaluated by optimization
over piecewise-constant controls.

  - itilde:  rate of the scaled terminal log-price X_T - x0, with the degenerate
             (zero skeleton volatility) branch when y0 = 0
  - qtilde:  rate of the scaled log-price path
  - qtildePathsetInf: infimum of qtilde over the binary barrier path sets
  - jRate:   rate of the unconstrained volatility process, closed form through the
             inverse-control operator

Optimizers work in scaled coordinates z = sqrt(dt) * fdot so that the control energy
is 1/2 |z|^2 independent of the grid.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging
import math
import time

import numpy as np

from rcsb.reflectsv.ldp.ControlledSkeleton import l1WitnessControl, mOperator, solveControlledBatch
from rcsb.reflectsv.ldp.MultiStartOptimizer import MultiStartOptimizer, OptimizerConfig
from rcsb.reflectsv.ldp.PathUtils import Control, Path, TimeGrid, controlEnergy
from rcsb.reflectsv.ldp.ReflectSvErrors import DegenerateDenominatorError, NumericalFailure, ValidationError

logger = logging.getLogger(__name__)

DEGENERATE_THRESHOLD = 1.0e-14
L1_PENALTY = 1.0e6
DEFAULT_RATE_STEPS = 100
SET_KINDS = ("up_in", "up_out", "down_in", "down_out")


class RateResult(object):
    """Value of a rate functional with its minimizing control and optimizer diagnostics."""

    def __init__(
        self,
        value,
        minimizerF,
        grid,
        minimizerG=None,
        nStarts=0,
        convergedStarts=0,
        bestGradientNorm=0.0,
        infinite=False,
        branch="direct",
        continuityFlag=True,
        startRecords=None,
        branchValues=None,
    ):
        self.value = math.inf if infinite else float(value)
        self.minimizerF = minimizerF
        self.minimizerG = minimizerG
        self.grid = grid
        self.nStarts = int(nStarts)
        self.convergedStarts = int(convergedStarts)
        self.bestGradientNorm = float(bestGradientNorm)
        self.infinite = bool(infinite)
        self.branch = branch
        self.continuityFlag = bool(continuityFlag)
        self.startRecords = startRecords or []
        self.branchValues = branchValues or {}

    def isConverged(self):
        return self.infinite or self.convergedStarts > 0

    def toDict(self):
        return {
            "value": None if self.infinite else self.value,
            "infinite": self.infinite,
            "branch": self.branch,
            "n_starts": self.nStarts,
            "converged_starts": self.convergedStarts,
            "best_gradient_norm": self.bestGradientNorm,
            "continuity_flag": self.continuityFlag,
            "branch_values": {ky: (None if not math.isfinite(v) else v) for ky, v in self.branchValues.items()},
            "grid": {"T": self.grid.T, "n_steps": self.grid.nSteps},
            "starts": [
                {"start": rec.startIndex, "value": rec.value if math.isfinite(rec.value) else None, "converged": rec.converged, "gradient_norm": rec.gradientNorm, "energy": rec.energy}
                for rec in self.startRecords
            ],
        }

    def __repr__(self):
        return "RateResult(value=%r, branch=%s, converged=%d/%d)" % (self.value, self.branch, self.convergedStarts, self.nStarts)


class BarrierSet(object):
    """Path set of a binary barrier option: hit (in) or avoid (out) log K - x0 from above or below."""

    def __init__(self, kind, K):
        if kind not in SET_KINDS:
            raise ValidationError("Unknown barrier set kind %r (expected one of %s)" % (kind, ", ".join(SET_KINDS)))
        if not K > 0.0:
            raise ValidationError("Barrier level must be positive, got %r" % K)
        self.kind = kind
        self.K = float(K)
        self.direction, self.knock = kind.split("_")

    def level(self, spec):
        """Log-barrier relative to x0 after checking that s0 starts on the proper side."""
        if self.direction == "up" and not spec.s0 < self.K:
            raise ValidationError("Up-type barrier requires s0 < K (s0=%r, K=%r)" % (spec.s0, self.K))
        if self.direction == "down" and not self.K < spec.s0:
            raise ValidationError("Down-type barrier requires K < s0 (s0=%r, K=%r)" % (spec.s0, self.K))
        return math.log(self.K) - spec.x0

    def contains(self, gValues, level, tolerance=1.0e-9):
        """Membership test; hitting sets accept paths that reach the level within tolerance."""
        tol = tolerance * max(1.0, abs(level)) if self.knock == "in" else 0.0
        if self.direction == "up":
            hit = np.max(gValues) >= level - tol
        else:
            hit = np.min(gValues) <= level + tol
        return bool(hit) if self.knock == "in" else not bool(hit)


def _grid(spec, grid):
    if grid is None:
        return TimeGrid(spec.T, DEFAULT_RATE_STEPS)
    if grid.T != spec.T:
        raise ValidationError("Grid horizon %r does not match model horizon %r" % (grid.T, spec.T))
    return grid


def _config(opt):
    return opt if opt is not None else OptimizerConfig()


class _SkeletonProblem(object):
    """Shared evaluation of the skeleton volatility for rows of scaled controls."""

    def __init__(self, spec, grid):
        self._spec = spec
        self._grid = grid
        self._sqDt = math.sqrt(grid.dt)
        self._tL = grid.leftNodes()
        self.dim = grid.nSteps
        self.zScale = self._sqDt

    def _skeleton(self, zA):
        fdot = zA / self._sqDt
        _, refA = solveControlledBatch(self._spec.coefficients, self._spec.y0, self._grid, fdot)
        refL = refA[:, :-1]
        cs = self._spec.coefficients
        return fdot, refL, cs.sigma(self._tL, refL), cs.b(self._tL, refL)

    def toControl(self, z):
        return Control(self._grid, np.asarray(z[: self._grid.nSteps]) / self._sqDt)


class _ItildeProblem(_SkeletonProblem):
    def __init__(self, spec, x, grid):
        super(_ItildeProblem, self).__init__(spec, grid)
        self.__x = x

    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        dt = self._grid.dt
        spec = self._spec
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            fdot, _, sA, bA = self._skeleton(zA)
            num = self.__x - dt * np.sum(bA + spec.rho * sA * fdot, axis=1)
            den = dt * np.sum(sA * sA, axis=1)
            vA = num * num / (2.0 * spec.rhoBar ** 2 * den) + 0.5 * np.sum(zA * zA, axis=1)
        vA[~(den >= DEGENERATE_THRESHOLD)] = np.inf
        vA[~np.isfinite(vA)] = np.inf
        return vA


class _L1PenaltyProblem(_SkeletonProblem):
    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        with np.errstate(over="ignore", invalid="ignore"):
            _, refA = solveControlledBatch(self._spec.coefficients, self._spec.y0, self._grid, zA / self._sqDt)
            peak = np.max(refA, axis=1)
            vA = 0.5 * np.sum(zA * zA, axis=1) + L1_PENALTY * peak * peak
        vA[~np.isfinite(vA)] = np.inf
        return vA


class _BoundedEnergyProblem(object):
    """1/2 |z|^2 subject to fdot <= upper on every step."""

    def __init__(self, grid, upper):
        sqDt = math.sqrt(grid.dt)
        self.dim = grid.nSteps
        self.zScale = sqDt
        self.bounds = [(None, upper * sqDt)] * grid.nSteps

    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        return 0.5 * np.sum(zA * zA, axis=1)


class _QtildeProblem(_SkeletonProblem):
    def __init__(self, spec, gdot, grid):
        super(_QtildeProblem, self).__init__(spec, grid)
        self.__gdot = gdot

    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        spec = self._spec
        dt = self._grid.dt
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            fdot, _, sA, bA = self._skeleton(zA)
            resid = self.__gdot[np.newaxis, :] - bA - spec.rho * sA * fdot
            wA = spec.rhoBar * sA
            # steps with vanishing volatility must follow the drift exactly
            rA = np.where(wA > 0.0, resid / wA, np.where(np.abs(resid) <= 1.0e-9, 0.0, np.inf))
            vA = 0.5 * dt * np.sum(rA * rA, axis=1) + 0.5 * np.sum(zA * zA, axis=1)
        vA[~np.isfinite(vA)] = np.inf
        return vA


class _HittingProblem(_SkeletonProblem):
    """Hitting-set infimum with the path variable eliminated in closed form.

    For a hitting node tau the cheapest path reaching the level costs
    gap_tau^2 / (2 W_tau) with M_tau, W_tau the cumulative drift and variance of the
    log-price skeleton; the objective is the minimum over tau plus the control energy
    on [0, tau].
    """

    def __init__(self, spec, level, direction, grid):
        super(_HittingProblem, self).__init__(spec, grid)
        self.__level = level
        self.__sign = 1.0 if direction == "up" else -1.0

    def components(self, zA):
        spec = self._spec
        dt = self._grid.dt
        fdot, _, sA, bA = self._skeleton(zA)
        mA = bA + spec.rho * sA * fdot
        w2A = (spec.rhoBar * sA) ** 2
        cumM = dt * np.cumsum(mA, axis=1)
        cumW = dt * np.cumsum(w2A, axis=1)
        cumE = 0.5 * np.cumsum(zA * zA, axis=1)
        gap = np.maximum(self.__sign * (self.__level - cumM), 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            cost = np.where(gap > 0.0, gap * gap / (2.0 * cumW), 0.0) + cumE
        cost[~np.isfinite(cost)] = np.inf
        return mA, w2A, cumM, cumW, cost

    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        with np.errstate(over="ignore", invalid="ignore"):
            cost = self.components(zA)[-1]
        return np.min(cost, axis=1)

    def reconstruct(self, z):
        """Minimizing control truncated after the hitting node and the matching path g."""
        dt = self._grid.dt
        mA, w2A, cumM, cumW, cost = self.components(z[np.newaxis, :])
        tau = int(np.argmin(cost[0])) + 1
        zT = np.array(z, dtype=np.float64)
        zT[tau:] = 0.0
        mA, w2A, cumM, cumW, _ = self.components(zT[np.newaxis, :])
        gap = max(self.__sign * (self.__level - cumM[0, tau - 1]), 0.0)
        lam = self.__sign * gap / cumW[0, tau - 1] if gap > 0.0 else 0.0
        gdot = mA[0].copy()
        gdot[:tau] += lam * w2A[0, :tau]
        gValues = np.concatenate(([0.0], dt * np.cumsum(gdot)))
        return zT, gValues


class _AvoidingProblem(_SkeletonProblem):
    """Avoiding-set infimum over (f, u) with g driven by u and a quadratic barrier penalty."""

    def __init__(self, spec, level, direction, grid, penalty):
        super(_AvoidingProblem, self).__init__(spec, grid)
        self.dim = 2 * grid.nSteps
        self.__level = level
        self.__sign = 1.0 if direction == "up" else -1.0
        self.__margin = 1.0e-9 * max(1.0, abs(level))
        self.penalty = penalty

    def paths(self, zA):
        n = self._grid.nSteps
        spec = self._spec
        dt = self._grid.dt
        fdot, _, sA, bA = self._skeleton(zA[:, :n])
        mA = bA + spec.rho * sA * fdot
        wA = spec.rhoBar * sA
        gdot = mA + wA * zA[:, n:] / self._sqDt
        return mA, wA, dt * np.cumsum(gdot, axis=1)

    def violation(self, gA):
        return np.maximum(self.__sign * (gA - self.__level) + self.__margin, 0.0)

    def evaluateBatch(self, zA):
        zA = np.atleast_2d(zA)
        with np.errstate(over="ignore", invalid="ignore"):
            _, _, gA = self.paths(zA)
            vio = self.violation(gA)
            vA = 0.5 * np.sum(zA * zA, axis=1) + self.penalty * np.sum(vio * vio, axis=1)
        vA[~np.isfinite(vA)] = np.inf
        return vA

    def restore(self, z):
        """Clip g into the closed interior of the set and recompute the u coordinates."""
        n = self._grid.nSteps
        dt = self._grid.dt
        zR = np.array(z, dtype=np.float64)
        mA, wA, gA = self.paths(zR[np.newaxis, :])
        target = self.__level - self.__sign * self.__margin
        gC = np.minimum(gA[0], target) if self.__sign > 0 else np.maximum(gA[0], target)
        gdot = np.diff(np.concatenate(([0.0], gC))) / dt
        with np.errstate(divide="ignore", invalid="ignore"):
            uA = np.where(wA[0] > 0.0, self._sqDt * (gdot - mA[0]) / wA[0], 0.0)
        zR[n:] = uA
        return zR

    def gValues(self, z):
        return np.concatenate(([0.0], self.paths(np.atleast_2d(z))[2][0]))


def _shifted(recordList, offset):
    return [rec._replace(startIndex=rec.startIndex + offset) for rec in recordList]


def itildeObjective(spec, x, f):
    """Terminal log-price objective for one control.

    (x - int[b(fhat) + rho sigma(fhat) fdot])^2 / (2 rhoBar^2 int sigma(fhat)^2) + 1/2 int fdot^2
    with left-endpoint quadrature.

    Args:
        spec (ModelSpec): model
        x (float): terminal target for X_T - x0
        f (Control): control

    Returns:
        float: objective value
    """
    grid = f.grid
    dt = grid.dt
    cs = spec.coefficients
    _, refA = solveControlledBatch(cs, spec.y0, grid, f.derivative[np.newaxis, :])
    tL = grid.leftNodes()
    refL = refA[0, :-1]
    sA = cs.sigma(tL, refL)
    num = x - dt * float(np.sum(cs.b(tL, refL) + spec.rho * sA * f.derivative))
    den = dt * float(np.sum(sA * sA))
    if not den >= DEGENERATE_THRESHOLD:
        raise DegenerateDenominatorError("Integrated skeleton variance %.3g is below %.1g" % (den, DEGENERATE_THRESHOLD), denominator=den)
    return num * num / (2.0 * spec.rhoBar ** 2 * den) + controlEnergy(f)


def _l1BranchApplies(spec, x, grid):
    cs = spec.coefficients
    if spec.y0 != 0.0 or cs.family not in ("reflected_ou", "reflected_bm_drift"):
        return False
    tL = grid.leftNodes()
    zeroDrift = grid.dt * float(np.sum(cs.b(tL, np.zeros_like(tL))))
    return abs(x - zeroDrift) <= 1.0e-10 * max(1.0, abs(x))


def l1Infimum(spec, opt=None, grid=None):
    """Infimum of int fdot^2 over controls with identically zero skeleton for drifted reflected BM.

    The closed form a^2 T / xi^2 is cross-checked by the bound-constrained optimizer with
    fdot <= -a / xi on every step.

    Args:
        spec (ModelSpec): reflected_bm_drift model with y0 = 0
        opt (OptimizerConfig, optional): optimizer settings
        grid (TimeGrid, optional): control grid

    Returns:
        float: a^2 T / xi^2
    """
    cs = spec.coefficients
    if cs.family != "reflected_bm_drift":
        raise ValidationError("Closed-form degenerate infimum applies to reflected_bm_drift only, got %s" % cs.family)
    if spec.y0 != 0.0:
        raise ValidationError("Degenerate infimum requires y0 = 0, got %r" % spec.y0)
    grid = _grid(spec, grid)
    pD = cs.params
    value = pD["a"] ** 2 * spec.T / pD["xi"] ** 2
    cfg = _config(opt).replace(nStarts=1, numProc=1)
    res = MultiStartOptimizer(cfg).minimize(_BoundedEnergyProblem(grid, -pD["a"] / pD["xi"]))
    check = 2.0 * res.best.value
    logger.debug("Degenerate infimum closed form %.12g constrained optimizer %.12g", value, check)
    if abs(check - value) > 1.0e-4:
        raise NumericalFailure("Constrained optimizer value %.8g disagrees with closed form %.8g" % (check, value))
    return value


def _l1Branch(spec, opt, grid):
    """Degenerate branch: (value, control, records, converged)."""
    cs = spec.coefficients
    witness = l1WitnessControl(cs, grid)
    if cs.family == "reflected_bm_drift":
        value = 0.5 * l1Infimum(spec, opt, grid)
        return value, witness, [], 1
    problem = _L1PenaltyProblem(spec, grid)
    z0 = math.sqrt(grid.dt) * witness.derivative
    res = MultiStartOptimizer(opt.replace(numProc=1)).minimize(problem, starts=z0[np.newaxis, :])
    best = res.best
    return best.value, problem.toControl(best.z), res.records, int(best.converged)


def itilde(spec, x, opt=None, grid=None):
    """Rate of X_T - x0 at x by multi-start quasi-Newton over controls.

    For y0 = 0 with a volatility map vanishing at zero, the degenerate branch over controls
    with identically zero skeleton is added at x = int b(s, 0) ds and the smaller branch wins.

    Args:
        spec (ModelSpec): catalog model
        x (float): target value of X_T - x0
        opt (OptimizerConfig, optional): optimizer settings
        grid (TimeGrid, optional): control grid. Defaults to 100 steps on [0, T].

    Returns:
        RateResult: value and minimizer
    """
    grid = _grid(spec, grid)
    opt = _config(opt)
    startTime = time.time()
    problem = _ItildeProblem(spec, float(x), grid)
    res = MultiStartOptimizer(opt).minimize(problem)
    best = res.best
    recordL = list(res.records)
    branchD = {"L2": best.value}
    value, control, branch = best.value, problem.toControl(best.z), "L2"
    nConverged = sum(rec.converged for rec in res.records)
    gradNorm = best.gradientNorm
    if math.isfinite(value):
        value = itildeObjective(spec, x, control)
    if _l1BranchApplies(spec, x, grid):
        l1Value, l1Control, l1Records, l1Converged = _l1Branch(spec, opt, grid)
        branchD["L1"] = l1Value
        recordL.extend(_shifted(l1Records, len(res.records)))
        nConverged += l1Converged
        if l1Value < value or not math.isfinite(value):
            value, control, branch, gradNorm = l1Value, l1Control, "L1", 0.0
    infinite = not math.isfinite(value)
    logger.info("itilde x=%.6g value %.10g branch %s converged %d/%d (%.2f seconds)", x, value, branch, nConverged, len(recordL), time.time() - startTime)
    return RateResult(
        value,
        control,
        grid,
        nStarts=len(recordL),
        convergedStarts=nConverged,
        bestGradientNorm=gradNorm,
        infinite=infinite,
        branch=branch,
        startRecords=recordL,
        branchValues=branchD,
    )


def qtildeObjective(spec, g, f):
    """1/2 int [(gdot - b(fhat) - rho sigma(fhat) fdot) / (rhoBar sigma(fhat))]^2 + 1/2 int fdot^2."""
    grid = f.grid
    if g.grid != grid:
        raise ValidationError("Path and control grids differ")
    gdot = np.diff(g.values) / grid.dt
    problem = _QtildeProblem(spec, gdot, grid)
    return float(problem.evaluateBatch(math.sqrt(grid.dt) * f.derivative)[0])


def _requireStrictSigma(spec, what):
    if not spec.coefficients.sigmaStrictlyPositive:
        raise ValidationError("%s requires a strictly positive volatility map (family %s)" % (what, spec.coefficients.family))


def qtilde(spec, g, opt=None):
    """Rate of the scaled log-price path g - x0 (g in the Cameron-Martin space).

    Args:
        spec (ModelSpec): model with strictly positive sigma
        g (Path): target path starting at 0
        opt (OptimizerConfig, optional): optimizer settings

    Returns:
        RateResult: value, minimizing control and g
    """
    _requireStrictSigma(spec, "Path rate")
    grid = _grid(spec, g.grid)
    opt = _config(opt)
    if abs(g.values[0]) > 1.0e-12:
        logger.info("Path rate target does not start at zero (g(0)=%r)", g.values[0])
        return RateResult(math.inf, Control.zero(grid), grid, minimizerG=g, infinite=True, branch="direct")
    gdot = np.diff(g.values) / grid.dt
    problem = _QtildeProblem(spec, gdot, grid)
    res = MultiStartOptimizer(opt).minimize(problem)
    best = res.best
    control = problem.toControl(best.z)
    value = qtildeObjective(spec, g, control) if math.isfinite(best.value) else math.inf
    return RateResult(
        value,
        control,
        grid,
        minimizerG=g,
        nStarts=len(res.records),
        convergedStarts=sum(rec.converged for rec in res.records),
        bestGradientNorm=best.gradientNorm,
        infinite=not math.isfinite(value),
        branch="L2",
        startRecords=res.records,
    )


def qtildePathsetInf(spec, setSpec, opt=None, grid=None, allowDegenerate=False):
    """Infimum of the path rate over a barrier path set.

    Hitting sets eliminate g in closed form for each hitting node; avoiding sets are
    approached from feasible interior iterates under the penalty schedule.

    Args:
        spec (ModelSpec): model (strictly positive sigma unless allowDegenerate)
        setSpec (BarrierSet): barrier set descriptor
        opt (OptimizerConfig, optional): optimizer settings
        grid (TimeGrid, optional): control grid
        allowDegenerate (bool, optional): evaluate models whose sigma vanishes, flagging the
            result as lacking the continuity hypothesis. Defaults to False.

    Returns:
        RateResult: infimum, minimizing control and path
    """
    continuity = spec.coefficients.sigmaStrictlyPositive
    if not continuity and not allowDegenerate:
        _requireStrictSigma(spec, "Barrier set infimum")
    grid = _grid(spec, grid)
    opt = _config(opt)
    level = setSpec.level(spec)
    startTime = time.time()
    if setSpec.knock == "in":
        problem = _HittingProblem(spec, level, setSpec.direction, grid)
        res = MultiStartOptimizer(opt).minimize(problem)
        best = res.best
        if not math.isfinite(best.value):
            raise NumericalFailure("No start reached the barrier set %s" % setSpec.kind)
        zT, gValues = problem.reconstruct(best.z)
        records = res.records
        nConverged = sum(rec.converged for rec in records)
        gradNorm = best.gradientNorm
    else:
        records, zT, gradNorm, nConverged = _avoidingInf(spec, level, setSpec.direction, opt, grid)
        problem = _AvoidingProblem(spec, level, setSpec.direction, grid, opt.constraintPenaltySchedule[-1])
        gValues = problem.gValues(zT)
    control = Control(grid, zT[: grid.nSteps] / math.sqrt(grid.dt))
    gPath = Path(grid, gValues)
    if not setSpec.contains(gValues, level):
        raise NumericalFailure("Reconstructed path is outside the barrier set %s" % setSpec.kind)
    value = qtildeObjective(spec, gPath, control)
    logger.info("Barrier set %s level %.6g infimum %.10g converged %d/%d (%.2f seconds)", setSpec.kind, level, value, nConverged, len(records), time.time() - startTime)
    return RateResult(
        value,
        control,
        grid,
        minimizerG=gPath,
        nStarts=len(records),
        convergedStarts=nConverged,
        bestGradientNorm=gradNorm,
        infinite=not math.isfinite(value),
        branch="closed_form" if setSpec.knock == "in" else "L2",
        continuityFlag=continuity,
        startRecords=records,
    )


def _avoidingInf(spec, level, direction, opt, grid):
    scheduleL = list(opt.constraintPenaltySchedule)
    problem = _AvoidingProblem(spec, level, direction, grid, scheduleL[0])
    optimizer = MultiStartOptimizer(opt)
    starts = optimizer.buildStarts(problem)
    starts = np.array([problem.restore(z) for z in starts])
    res = optimizer.minimize(problem, starts=starts)
    records = list(res.records)
    z = res.best.z
    best = res.best
    for penalty in scheduleL[1:]:
        problem.penalty = penalty
        res = MultiStartOptimizer(opt.replace(numProc=1)).minimize(problem, starts=z[np.newaxis, :])
        best = res.best
        z = best.z
        records.extend(_shifted(res.records, len(records)))
    zR = problem.restore(z)
    nConverged = sum(rec.converged for rec in records)
    return records, zR, best.gradientNorm, nConverged


def jRate(spec, target, opt=None):
    """Rate of the unconstrained volatility process at target, 1/2 int (inverse control)^2.

    Args:
        spec (ModelSpec): model with strictly positive c (uses coefficients and y0)
        target (Path): volatility path
        opt (OptimizerConfig, optional): unused, kept for a uniform signature

    Returns:
        RateResult: value with the recovering control; infinite when target(0) != y0
    """
    _ = opt
    cs = spec.coefficients
    if not cs.cStrictlyPositive:
        raise ValidationError("Volatility rate requires a strictly positive diffusion coefficient")
    grid = target.grid
    if abs(target.values[0] - spec.y0) > 1.0e-12 * max(1.0, spec.y0):
        return RateResult(math.inf, Control.zero(grid), grid, infinite=True, branch="direct")
    control = mOperator(cs, spec.y0, target)
    return RateResult(controlEnergy(control), control, grid, nStarts=0, convergedStarts=0, branch="direct")


def supVolatilityRateBound(spec, y, grid=None):
    """Straight-line bound on the rate of {sup Y >= y}.

    Minimum of J over paths that rise linearly from y0 to y at a grid node and follow the
    uncontrolled dynamics afterwards.

    Args:
        spec (ModelSpec): model with strictly positive c
        y (float): level above y0
        grid (TimeGrid, optional): grid

    Returns:
        float: bound on the decay rate
    """
    grid = _grid(spec, grid)
    if not y > spec.y0:
        raise ValidationError("Level %r must exceed the initial state %r" % (y, spec.y0))
    cs = spec.coefficients
    tA = grid.nodes()
    best = math.inf
    for tau in range(1, grid.nSteps + 1):
        vA = np.empty(grid.nSteps + 1)
        vA[: tau + 1] = spec.y0 + (y - spec.y0) * tA[: tau + 1] / tA[tau]
        runMin = min(0.0, float(np.min(vA[: tau + 1])))
        for k in range(tau, grid.nSteps):
            ref = vA[k] - runMin
            vA[k + 1] = vA[k] + float(cs.a(tA[k], ref)) * grid.dt
            runMin = min(runMin, vA[k + 1], 0.0)
        result = jRate(spec, Path(grid, vA))
        best = min(best, result.value)
    return best

