##
# File:    NoiseGenerator.py
# Author:  J. Westbrook
# Date:    14-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Replayable Gaussian increments from a counter-based generator.

Each (seed, replica, stream) triple owns a disjoint Philox counter range, so any
replica can be regenerated independently of the others and of the worker layout.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import logging

import numpy as np

from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)

STREAM_W = 0
STREAM_B = 1
STREAM_BASELINE = 2
STREAM_OPTIMIZER = 3
STREAM_PROPERTY = 4

SEED_MASK = (1 << 64) - 1


def counterGenerator(seed, stream, replicaIndex=0):
    """numpy Generator over Philox keyed by seed with counter block (stream, replicaIndex)."""
    key = int(seed) & SEED_MASK
    bitGen = np.random.Philox(key=key, counter=[0, 0, int(stream), int(replicaIndex)])
    return np.random.Generator(bitGen)


class NoiseBundle(object):
    def __init__(self, grid, dW, dB, seed, replicaIndex):
        self.grid = grid
        self.dW = np.asarray(dW, dtype=np.float64)
        self.dB = np.asarray(dB, dtype=np.float64)
        self.seed = int(seed)
        self.replicaIndex = int(replicaIndex)
        for name, vA in (("dW", self.dW), ("dB", self.dB)):
            if vA.shape != (grid.nSteps,):
                raise ValidationError("%s must hold %d increments, got shape %r" % (name, grid.nSteps, vA.shape))

    def brownianPath(self, stream=STREAM_B):
        """Node values of the driving Brownian motion reconstructed from its increments."""
        incA = self.dB if stream == STREAM_B else self.dW
        return np.concatenate(([0.0], np.cumsum(incA)))


class NoiseGenerator(object):
    """Gaussian increments with variance dt for the asset (W) and volatility (B) noises."""

    def __init__(self, seed):
        if seed is None or int(seed) < 0:
            raise ValidationError("Seed must be a nonnegative integer, got %r" % seed)
        self.__seed = int(seed)

    @property
    def seed(self):
        return self.__seed

    def normals(self, nSteps, replicaIndex, stream):
        return counterGenerator(self.__seed, stream, replicaIndex).standard_normal(nSteps)

    def generate(self, grid, replicaIndex):
        sqDt = np.sqrt(grid.dt)
        dW = sqDt * self.normals(grid.nSteps, replicaIndex, STREAM_W)
        dB = sqDt * self.normals(grid.nSteps, replicaIndex, STREAM_B)
        return NoiseBundle(grid, dW, dB, self.__seed, replicaIndex)

    def generateBlock(self, grid, replicaStart, count, streamList=(STREAM_W, STREAM_B)):
        """Increments for replicas replicaStart .. replicaStart + count - 1.

        Args:
            grid (TimeGrid): time grid
            replicaStart (int): first replica index
            count (int): number of replicas
            streamList (tuple, optional): streams to generate. Defaults to (STREAM_W, STREAM_B).

        Returns:
            list: one (count, nSteps) array of scaled increments per stream
        """
        sqDt = np.sqrt(grid.dt)
        rL = []
        for stream in streamList:
            oA = np.empty((count, grid.nSteps))
            for ii in range(count):
                oA[ii] = self.normals(grid.nSteps, replicaStart + ii, stream)
            rL.append(sqDt * oA)
        return rL
