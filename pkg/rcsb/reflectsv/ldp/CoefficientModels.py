##
# File:    CoefficientModels.py
# Author:  J. Westbrook
# Date:    14-Oct-2026
# Version: 0.001
#
# Updated:
#  17-Oct-2026 jdw add exponential_vol dynamics selector and config round trip
#
##
"""
Catalog of coefficient sets for the reflecting volatility process (a, c) and the
asset log-price (b, sigma), plus the model specification that binds them to
initial values, correlation, rate and horizon.

Coefficients are registered evaluators keyed by family name and parameters so that
model specifications serialize back to configuration text.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import copy
import logging
import math
from collections import namedtuple

import numpy as np

from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)

ValidationReport = namedtuple("ValidationReport", "lipschitzQuotient growthRatio lipschitzHint growthHint sigmaNonnegative sigmaPositive violation messages")

FAMILY_LIST = ["reflected_ou", "reflected_bm_drift", "constant_vol", "exponential_vol"]
DYNAMICS_LIST = ["reflected_ou", "reflected_bm_drift"]


def _asArrays(t, x):
    tA = np.asarray(t, dtype=np.float64)
    xA = np.asarray(x, dtype=np.float64)
    return np.broadcast_arrays(tA, xA)


class CoefficientSet(object):
    """Coefficient functions a, c, b, sigma of (t, x) with regularity metadata.

    Evaluators are vectorized over numpy arguments.
    """

    def __init__(self, family, paramD, volDynamics=None):
        if family not in FAMILY_LIST:
            raise ValidationError("Unknown model family %r" % family)
        self.__family = family
        self.__paramD = dict(paramD)
        self.__volDynamics = volDynamics
        if family == "reflected_ou":
            q, m, xi = paramD["q"], paramD["m"], paramD["xi"]
            self.__lipschitzHint = q
            self.__growthHint = 2.0 * max(q * m + q, xi)
            self.__cPositive, self.__sigmaPositive = True, False
        elif family == "reflected_bm_drift":
            self.__lipschitzHint = 0.0
            self.__growthHint = 2.0 * max(paramD["a"], paramD["xi"])
            self.__cPositive, self.__sigmaPositive = True, False
        elif family == "constant_vol":
            self.__lipschitzHint = 0.0
            self.__growthHint = 2.0
            self.__cPositive, self.__sigmaPositive = True, True
        else:
            if volDynamics is None or volDynamics.family not in DYNAMICS_LIST:
                raise ValidationError("exponential_vol requires reflected_ou or reflected_bm_drift dynamics")
            self.__lipschitzHint = volDynamics.lipschitzHint
            self.__growthHint = volDynamics.growthHint
            self.__cPositive, self.__sigmaPositive = volDynamics.cStrictlyPositive, True

    @property
    def family(self):
        return self.__family

    @property
    def params(self):
        return dict(self.__paramD)

    @property
    def volDynamics(self):
        return self.__volDynamics

    @property
    def cStrictlyPositive(self):
        return self.__cPositive

    @property
    def sigmaStrictlyPositive(self):
        return self.__sigmaPositive

    @property
    def lipschitzHint(self):
        return self.__lipschitzHint

    @property
    def growthHint(self):
        return self.__growthHint

    def a(self, t, x):
        tA, xA = _asArrays(t, x)
        fam, pD = self.__family, self.__paramD
        if fam == "reflected_ou":
            return pD["q"] * (pD["m"] - xA)
        if fam == "reflected_bm_drift":
            return np.full(xA.shape, float(pD["a"]))
        if fam == "constant_vol":
            return np.zeros(xA.shape)
        return self.__volDynamics.a(tA, xA)

    def c(self, t, x):
        tA, xA = _asArrays(t, x)
        fam, pD = self.__family, self.__paramD
        if fam in ("reflected_ou", "reflected_bm_drift"):
            return np.full(xA.shape, float(pD["xi"]))
        if fam == "constant_vol":
            return np.ones(xA.shape)
        return self.__volDynamics.c(tA, xA)

    def b(self, t, x):
        _, xA = _asArrays(t, x)
        if self.__family == "constant_vol":
            return np.full(xA.shape, float(self.__paramD["r"]))
        return np.full(xA.shape, float(self.__paramD["mu"]))

    def sigma(self, t, x):
        _, xA = _asArrays(t, x)
        fam, pD = self.__family, self.__paramD
        if fam in ("reflected_ou", "reflected_bm_drift"):
            return np.maximum(xA, 0.0)
        if fam == "constant_vol":
            return np.full(xA.shape, float(pD["sigma0"]))
        return np.exp(xA - pD["k"])

    def driftRate(self):
        """Constant asset log-drift of the catalog families (mu, or r for constant_vol)."""
        return float(self.__paramD["r"]) if self.__family == "constant_vol" else float(self.__paramD["mu"])

    def toConfig(self):
        rD = {"family": self.__family}
        rD.update(self.__paramD)
        if self.__volDynamics is not None:
            rD["dynamics"] = self.__volDynamics.family
            rD.update(self.__volDynamics.params)
            # the dynamics carries no asset drift of its own
            rD["mu"] = self.__paramD["mu"]
        return rD

    def __repr__(self):
        return "CoefficientSet(%s, %r)" % (self.__family, self.__paramD)


def _checkFinite(nameD):
    for ky, val in nameD.items():
        if val is None or not math.isfinite(float(val)):
            raise ValidationError("Coefficient parameter %s must be finite, got %r" % (ky, val))


def makeReflectedOu(q, m, xi, mu):
    """Reflected Ornstein-Uhlenbeck volatility: a = q(m - x), c = xi, b = mu, sigma = max(x, 0)."""
    _checkFinite({"q": q, "m": m, "xi": xi, "mu": mu})
    if xi <= 0.0:
        raise ValidationError("Volatility-of-volatility xi must be positive, got %r" % xi)
    if q < 0.0:
        raise ValidationError("Mean reversion q must be nonnegative, got %r" % q)
    if m < 0.0:
        raise ValidationError("Long-run mean m must be nonnegative, got %r" % m)
    return CoefficientSet("reflected_ou", {"q": float(q), "m": float(m), "xi": float(xi), "mu": float(mu)})


def makeReflectedBmDrift(driftA, xi, mu):
    """Reflected Brownian motion with drift: a = driftA, c = xi, b = mu, sigma = max(x, 0)."""
    _checkFinite({"a": driftA, "xi": xi, "mu": mu})
    if xi <= 0.0:
        raise ValidationError("Volatility-of-volatility xi must be positive, got %r" % xi)
    if driftA < 0.0:
        raise ValidationError("Drift a must be nonnegative, got %r" % driftA)
    return CoefficientSet("reflected_bm_drift", {"a": float(driftA), "xi": float(xi), "mu": float(mu)})


def makeConstantVol(sigma0, r):
    _checkFinite({"sigma0": sigma0, "r": r})
    if sigma0 <= 0.0:
        raise ValidationError("Constant volatility sigma0 must be positive, got %r" % sigma0)
    return CoefficientSet("constant_vol", {"sigma0": float(sigma0), "r": float(r)})


def makeExponentialVol(k, mu, volDynamics):
    """Exponential volatility map sigma = exp(x - k) over reflected OU or drifted BM dynamics.

    Args:
        k (float): volatility level shift
        mu (float): asset log-drift
        volDynamics (CoefficientSet): reflected_ou or reflected_bm_drift set supplying a and c

    Returns:
        CoefficientSet: exponential_vol coefficient set
    """
    _checkFinite({"k": k, "mu": mu})
    return CoefficientSet("exponential_vol", {"k": float(k), "mu": float(mu)}, volDynamics=volDynamics)


def validateCoefficients(cs, boxRadius, gridPoints, T=1.0):
    """Sampling check of the local Lipschitz and sublinear growth conditions.

    Args:
        cs (CoefficientSet): coefficients to check
        boxRadius (float): sample x over [0, boxRadius]
        gridPoints (int): number of sample points per axis
        T (float, optional): sample t over [0, T]. Defaults to 1.0.

    Returns:
        ValidationReport: estimates and violation flag
    """
    if not boxRadius > 0.0:
        raise ValidationError("Box radius must be positive, got %r" % boxRadius)
    if int(gridPoints) < 2:
        raise ValidationError("At least two grid points are required, got %r" % gridPoints)
    tA = np.linspace(0.0, T, int(gridPoints))
    xA = np.linspace(0.0, boxRadius, int(gridPoints))
    tG, xG = np.meshgrid(tA, xA, indexing="ij")
    aG, cG, bG, sG = cs.a(tG, xG), cs.c(tG, xG), cs.b(tG, xG), cs.sigma(tG, xG)
    for name, vG in (("a", aG), ("c", cG), ("b", bG), ("sigma", sG)):
        if not np.all(np.isfinite(vG)):
            raise ValidationError("Coefficient %s of %s is not finite on the sample box" % (name, cs.family))
    dx = np.diff(xG, axis=1)
    lipQ = max(float(np.max(np.abs(np.diff(aG, axis=1)) / dx)), float(np.max(np.abs(np.diff(cG, axis=1)) / dx)))
    growth = float(np.max((np.abs(aG) + np.abs(cG)) / (1.0 + np.abs(xG))))
    sigmaNonneg = bool(np.all(sG >= 0.0))
    sigmaPos = bool(np.all(sG > 0.0))
    msgL = []
    if lipQ > 2.0 * cs.lipschitzHint:
        msgL.append("Lipschitz quotient %.6g exceeds twice the hint %.6g" % (lipQ, cs.lipschitzHint))
    if growth > 2.0 * cs.growthHint:
        msgL.append("growth ratio %.6g exceeds twice the hint %.6g" % (growth, cs.growthHint))
    if not sigmaNonneg:
        msgL.append("sigma takes negative values")
    if cs.sigmaStrictlyPositive and not sigmaPos:
        msgL.append("sigma flagged strictly positive but vanishes on the sample box")
    for msg in msgL:
        logger.warning("%s: %s", cs.family, msg)
    return ValidationReport(lipQ, growth, cs.lipschitzHint, cs.growthHint, sigmaNonneg, sigmaPos, bool(msgL), msgL)


class ModelSpec(object):
    """Coefficients bound to initial state, correlation, interest rate and horizon."""

    def __init__(self, coefficients, y0, s0, rho, r, T):
        _checkFinite({"y0": y0, "s0": s0, "rho": rho, "r": r, "T": T})
        if y0 < 0.0:
            raise ValidationError("Initial volatility state y0 must be nonnegative, got %r" % y0)
        if s0 <= 0.0:
            raise ValidationError("Initial asset price s0 must be positive, got %r" % s0)
        if not abs(rho) < 1.0:
            raise ValidationError("Correlation must satisfy |rho| < 1, got %r" % rho)
        if r < 0.0:
            raise ValidationError("Interest rate must be nonnegative, got %r" % r)
        if T <= 0.0:
            raise ValidationError("Time horizon must be positive, got %r" % T)
        self.__cs = coefficients
        self.__y0 = float(y0)
        self.__s0 = float(s0)
        self.__rho = float(rho)
        self.__r = float(r)
        self.__T = float(T)

    @property
    def coefficients(self):
        return self.__cs

    @property
    def y0(self):
        return self.__y0

    @property
    def s0(self):
        return self.__s0

    @property
    def x0(self):
        return math.log(self.__s0)

    @property
    def rho(self):
        return self.__rho

    @property
    def rhoBar(self):
        return math.sqrt(1.0 - self.__rho * self.__rho)

    @property
    def r(self):
        return self.__r

    @property
    def T(self):
        return self.__T

    def isRiskNeutral(self):
        return self.__cs.driftRate() == self.__r

    def replace(self, **kwargs):
        argD = {"coefficients": self.__cs, "y0": self.__y0, "s0": self.__s0, "rho": self.__rho, "r": self.__r, "T": self.__T}
        argD.update(kwargs)
        return ModelSpec(**argD)

    def toConfig(self):
        rD = self.__cs.toConfig()
        rD.update({"y0": self.__y0, "s0": self.__s0, "rho": self.__rho, "r": self.__r, "T": self.__T})
        return rD

    def __repr__(self):
        return "ModelSpec(%r, y0=%r, s0=%r, rho=%r, r=%r, T=%r)" % (self.__cs, self.__y0, self.__s0, self.__rho, self.__r, self.__T)


def _dynamicsFromConfig(name, modelD):
    if name == "reflected_ou":
        return makeReflectedOu(modelD["q"], modelD["m"], modelD["xi"], modelD["mu"])
    if name == "reflected_bm_drift":
        return makeReflectedBmDrift(modelD["a"], modelD["xi"], modelD["mu"])
    raise ValidationError("Unknown volatility dynamics model.dynamics=%r" % name)


def coefficientsFromConfig(modelD):
    """Build the coefficient set named by modelD["family"] from a resolved model section."""
    family = modelD.get("family")
    if family == "constant_vol":
        return makeConstantVol(modelD["sigma0"], modelD["r"])
    if family == "exponential_vol":
        return makeExponentialVol(modelD["k"], modelD["mu"], _dynamicsFromConfig(modelD.get("dynamics", "reflected_bm_drift"), modelD))
    if family in DYNAMICS_LIST:
        return _dynamicsFromConfig(family, modelD)
    raise ValidationError("Unknown model family model.family=%r" % family)


def modelFromConfig(modelD):
    """Build a ModelSpec from a resolved model configuration section.

    Args:
        modelD (dict): model section with defaults applied

    Returns:
        ModelSpec: model specification
    """
    mD = copy.deepcopy(modelD)
    cs = coefficientsFromConfig(mD)
    return ModelSpec(cs, y0=mD["y0"], s0=mD["s0"], rho=mD["rho"], r=mD["r"], T=mD["T"])
