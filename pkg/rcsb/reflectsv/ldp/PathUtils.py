##
# File:    PathUtils.py
# Author:  J. Westbrook
# Date:    14-Oct-2026
# Version: 0.001
#
# Updated:
#  16-Oct-2026 jdw add off-node window endpoints to modulusOfContinuity()
#
##
"""
Discrete paths and controls on uniform time grids, the one-sided Skorokhod map,
norms and moduli of continuity.

All values are read-only numpy arrays so instances can be shared between workers.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging

import numpy as np

from rcsb.utils.io.MarshalUtil import MarshalUtil
from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)


def _frozen(values):
    vA = np.array(values, dtype=np.float64)
    vA.setflags(write=False)
    return vA


class TimeGrid(object):
    """Uniform grid 0 = t_0 < ... < t_n = T."""

    def __init__(self, T, nSteps):
        try:
            T = float(T)
            nSteps = int(nSteps)
        except (TypeError, ValueError) as e:
            raise ValidationError("Bad time grid arguments T=%r nSteps=%r (%s)" % (T, nSteps, str(e)))
        if not np.isfinite(T) or T <= 0.0:
            raise ValidationError("Time horizon must be positive, got %r" % T)
        if nSteps < 1:
            raise ValidationError("Number of steps must be >= 1, got %r" % nSteps)
        self.__T = T
        self.__nSteps = nSteps

    @property
    def T(self):
        return self.__T

    @property
    def nSteps(self):
        return self.__nSteps

    @property
    def dt(self):
        return self.__T / self.__nSteps

    def node(self, k):
        return k * self.__T / self.__nSteps

    def nodes(self):
        # k * T / n so that the last node is T exactly
        return np.arange(self.__nSteps + 1, dtype=np.float64) * self.__T / self.__nSteps

    def leftNodes(self):
        return self.nodes()[:-1]

    def refine(self, factor=2):
        return TimeGrid(self.__T, self.__nSteps * int(factor))

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and self.__T == other.T and self.__nSteps == other.nSteps

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.__T, self.__nSteps))

    def __repr__(self):
        return "TimeGrid(T=%r, nSteps=%r)" % (self.__T, self.__nSteps)


class Path(object):
    """Node samples of a continuous path, linearly interpolated between nodes."""

    def __init__(self, grid, values):
        vA = _frozen(values)
        if vA.ndim != 1 or vA.shape[0] != grid.nSteps + 1:
            raise ValidationError("Path requires %d node values, got shape %r" % (grid.nSteps + 1, vA.shape))
        if not np.all(np.isfinite(vA)):
            raise ValidationError("Path values must be finite")
        self.__grid = grid
        self.__values = vA

    @property
    def grid(self):
        return self.__grid

    @property
    def values(self):
        return self.__values

    def valueAt(self, t):
        return float(np.interp(t, self.__grid.nodes(), self.__values))

    def __len__(self):
        return self.__values.shape[0]

    def __repr__(self):
        return "Path(%r, %d values)" % (self.__grid, len(self))


class Control(object):
    """Piecewise-constant derivative samples of f in the Cameron-Martin space, f(0) = 0."""

    def __init__(self, grid, derivative):
        dA = _frozen(derivative)
        if dA.ndim != 1 or dA.shape[0] != grid.nSteps:
            raise ValidationError("Control requires %d derivative values, got shape %r" % (grid.nSteps, dA.shape))
        if not np.all(np.isfinite(dA)):
            raise ValidationError("Control derivative values must be finite")
        self.__grid = grid
        self.__derivative = dA

    @property
    def grid(self):
        return self.__grid

    @property
    def derivative(self):
        return self.__derivative

    @classmethod
    def zero(cls, grid):
        return cls(grid, np.zeros(grid.nSteps))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.nSteps, float(value)))

    def __repr__(self):
        return "Control(%r)" % self.__grid


def skorokhodValues(vA):
    """Running-min reflection applied along the last axis of an array of node values."""
    vA = np.asarray(vA, dtype=np.float64)
    return vA - np.minimum.accumulate(np.minimum(vA, 0.0), axis=-1)


def skorokhodMap(path):
    """One-sided Skorokhod map: output(k) = input(k) - min_{j<=k} min(input(j), 0).

    Args:
        path (Path): input path

    Returns:
        Path: the reflected path on the same grid
    """
    return Path(path.grid, skorokhodValues(path.values))


def supNorm(path):
    return float(np.max(np.abs(path.values)))


def runningMax(path):
    return Path(path.grid, np.maximum.accumulate(path.values))


def scalePath(path, alpha):
    return Path(path.grid, float(alpha) * path.values)


def pathDifference(path1, path2):
    if path1.grid != path2.grid:
        raise ValidationError("Paths are defined on different grids")
    return Path(path1.grid, path1.values - path2.values)


def modulusOfContinuity(path, delta):
    """Max of |p(t) - p(s)| over |t - s| <= delta for the piecewise-linear path.

    Extremal pairs of a piecewise-linear path occur at node pairs or at pairs with one
    endpoint on a node and the other exactly delta away.

    Args:
        path (Path): input path
        delta (float): window width, 0 < delta <= T

    Returns:
        float: modulus of continuity
    """
    grid = path.grid
    delta = float(delta)
    if not delta > 0.0 or delta > grid.T * (1.0 + 1.0e-12):
        raise ValidationError("Window width must satisfy 0 < delta <= T, got %r" % delta)
    vA = path.values
    ratio = delta / grid.dt
    mLag = min(int(np.floor(ratio + 1.0e-9)), grid.nSteps)
    frac = ratio - mLag
    omega = 0.0
    for lag in range(1, mLag + 1):
        omega = max(omega, float(np.max(np.abs(vA[lag:] - vA[:-lag]))))
    if mLag < grid.nSteps and frac > 1.0e-9:
        tA = grid.nodes()
        # windows [t_k, t_k + delta] and [t_k - delta, t_k] ending off-node
        fwd = tA + delta <= grid.T
        if np.any(fwd):
            offV = np.interp(tA[fwd] + delta, tA, vA)
            omega = max(omega, float(np.max(np.abs(offV - vA[fwd]))))
        bwd = tA - delta >= 0.0
        if np.any(bwd):
            offV = np.interp(tA[bwd] - delta, tA, vA)
            omega = max(omega, float(np.max(np.abs(vA[bwd] - offV))))
    return omega


def controlEnergy(control):
    """Half the squared Cameron-Martin norm, 1/2 * dt * sum(fdot^2)."""
    dA = control.derivative
    return 0.5 * control.grid.dt * float(np.dot(dA, dA))


def integrateControl(control):
    """Path f with f(t_k) = dt * sum_{j<k} fdot(j) and f(0) = 0."""
    grid = control.grid
    vA = np.concatenate(([0.0], grid.dt * np.cumsum(control.derivative)))
    return Path(grid, vA)


def exportPathCsv(path, filePath):
    """Write path nodes as CSV rows with header t,value."""
    mU = MarshalUtil()
    rowL = [{"t": float(t), "value": float(v)} for t, v in zip(path.grid.nodes(), path.values)]
    ok = mU.doExport(filePath, rowL, fmt="csv")
    logger.debug("Exported path (%d nodes) to %s status %r", len(rowL), filePath, ok)
    return ok


def importPathCsv(filePath):
    """Read a t,value CSV file written by exportPathCsv().

    Args:
        filePath (str): CSV file path

    Returns:
        Path: path on the uniform grid implied by the first and last time stamps
    """
    mU = MarshalUtil()
    if not mU.exists(filePath):
        raise ValidationError("Missing path file %s" % filePath)
    rowL = mU.doImport(filePath, fmt="csv")
    try:
        tA = np.array([float(row["t"]) for row in rowL])
        vA = np.array([float(row["value"]) for row in rowL])
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError("Bad path file %s (%s)" % (filePath, str(e)))
    if len(tA) < 2 or tA[0] != 0.0:
        raise ValidationError("Path file %s must start at t=0 and hold at least two nodes" % filePath)
    grid = TimeGrid(tA[-1], len(tA) - 1)
    if not np.allclose(tA, grid.nodes(), rtol=0.0, atol=1.0e-12 * max(1.0, grid.T)):
        raise ValidationError("Path file %s is not sampled on a uniform grid" % filePath)
    return Path(grid, vA)
