##
# File:    RunConfig.py
# Author:  J. Westbrook
# Date:    17-Oct-2026
# Version: 0.001
#
# Updated:
#
##
"""
Run configuration: JSON sections model, grid, mc, rate, option and output checked against
a typed schema with defaults before any computation starts.
"""
__docformat__ = "restructuredtext en"
__author__ = "John Westbrook"
__email__ = "john.westbrook@rcsb.org"
__license__ = "Apache 2.0"

import copy
import logging
import os

from rcsb.utils.io.MarshalUtil import MarshalUtil
from rcsb.reflectsv.ldp.CoefficientModels import modelFromConfig
from rcsb.reflectsv.ldp.MultiStartOptimizer import OptimizerConfig
from rcsb.reflectsv.ldp.OptionPricing import DEFAULT_LADDER, OptionSpec
from rcsb.reflectsv.ldp.PathUtils import TimeGrid
from rcsb.reflectsv.ldp.ReflectSvErrors import ValidationError

logger = logging.getLogger(__name__)

REQUIRED = object()
MAX_WORKERS_ENV = "REFLECTSV_MAX_WORKERS"
DEFAULT_T = 1.0

# section -> key -> (type name, default)
CONFIG_SCHEMA = {
    "model": {
        "family": ("str", REQUIRED),
        "dynamics": ("str", None),
        "q": ("float", None),
        "m": ("float", None),
        "xi": ("float", None),
        "mu": ("float", None),
        "a": ("float", None),
        "sigma0": ("float", None),
        "k": ("float", None),
        "y0": ("float", 0.0),
        "s0": ("float", 1.0),
        "rho": ("float", 0.0),
        "r": ("float", 0.0),
        "T": ("float", None),
    },
    "grid": {
        "T": ("float", None),
        "n_steps": ("int", 100),
    },
    "mc": {
        "eps": ("floatlist", [1.0]),
        "eps_ladder": ("floatlist", list(DEFAULT_LADDER)),
        "n_replicas": ("int", 10000),
        "seed": ("int", 0),
        "statistic": ("str", "terminal_logprice"),
        "level": ("float", None),
        "direction": ("str", None),
        "K": ("float", None),
        "knock": ("str", None),
        "alpha": ("float", None),
        "block_size": ("int", 2000),
    },
    "rate": {
        "n_starts": ("int", 8),
        "max_iterations": ("int", 500),
        "gradient_tolerance": ("float", 1.0e-6),
        "finite_difference_step": ("float", 1.0e-6),
        "start_scale": ("float", 0.5),
        "constraint_penalty_schedule": ("floatlist", [1.0e2, 1.0e4, 1.0e6]),
        "seed": ("int", None),
        "time_out": ("float", None),
        "target_kind": ("str", "itilde"),
        "x": ("float", None),
        "y": ("float", None),
        "path_file": ("str", None),
        "set_kind": ("str", None),
        "K": ("float", None),
        "n_points": ("int", 64),
        "allow_degenerate": ("bool", False),
    },
    "option": {
        "kind": ("str", None),
        "K": ("float", None),
        "G": ("float", 1.0),
    },
    "output": {
        "directory": ("str", "."),
        "formats": ("strlist", ["json", "csv"]),
    },
}

FAMILY_KEYS = {
    "reflected_ou": ("q", "m", "xi", "mu"),
    "reflected_bm_drift": ("a", "xi", "mu"),
    "constant_vol": ("sigma0",),
    "exponential_vol": ("k", "mu"),
}
TARGET_KINDS = ("itilde", "qtilde", "qtilde_pathset", "j_rate", "sup_bound")
OUTPUT_FORMATS = ("json", "csv")


def _isNumber(val):
    return isinstance(val, (int, float)) and not isinstance(val, bool)


def _coerce(dottedKey, typeName, val):
    if val is None:
        return None
    if typeName == "float":
        if not _isNumber(val):
            raise ValidationError("Config key %s expects a number, got %r" % (dottedKey, val))
        return float(val)
    if typeName == "int":
        if not (_isNumber(val) and float(val).is_integer()):
            raise ValidationError("Config key %s expects an integer, got %r" % (dottedKey, val))
        return int(val)
    if typeName == "bool":
        if not isinstance(val, bool):
            raise ValidationError("Config key %s expects true or false, got %r" % (dottedKey, val))
        return val
    if typeName == "str":
        if not isinstance(val, str):
            raise ValidationError("Config key %s expects a string, got %r" % (dottedKey, val))
        return val
    if typeName in ("floatlist", "strlist"):
        if _isNumber(val) and typeName == "floatlist":
            val = [val]
        if not isinstance(val, (list, tuple)):
            raise ValidationError("Config key %s expects a list, got %r" % (dottedKey, val))
        itemType = "float" if typeName == "floatlist" else "str"
        return [_coerce("%s[%d]" % (dottedKey, ii), itemType, v) for ii, v in enumerate(val)]
    raise ValidationError("Config key %s has unsupported type %s" % (dottedKey, typeName))


def workerCount(requested=None):
    """Worker processes: requested count (default cpu count) capped by REFLECTSV_MAX_WORKERS."""
    numProc = int(requested) if requested is not None else (os.cpu_count() or 1)
    if numProc < 1:
        raise ValidationError("Worker count must be at least 1, got %r" % requested)
    capS = os.environ.get(MAX_WORKERS_ENV)
    if capS:
        try:
            cap = int(capS)
        except ValueError:
            raise ValidationError("%s must be an integer, got %r" % (MAX_WORKERS_ENV, capS))
        if cap >= 1:
            numProc = min(numProc, cap)
    return numProc


class RunConfig(object):
    def __init__(self, configD=None):
        """Resolved and validated run configuration.

        Args:
            configD (dict, optional): raw configuration sections. Defaults to an empty document
                                      (which fails for lack of model.family).
        """
        self.__configD = self.__resolve(copy.deepcopy(configD or {}))
        self.__validate()

    @classmethod
    def fromFile(cls, filePath):
        mU = MarshalUtil()
        if not mU.exists(filePath):
            raise ValidationError("Config file %s does not exist" % filePath)
        configD = mU.doImport(filePath, fmt="json")
        if not isinstance(configD, dict):
            raise ValidationError("Config file %s does not hold a JSON object" % filePath)
        return cls(configD)

    def __resolve(self, configD):
        if not isinstance(configD, dict):
            raise ValidationError("Configuration must be a mapping of sections")
        for section in configD:
            if section not in CONFIG_SCHEMA:
                raise ValidationError("Unknown config section %s" % section)
        rD = {}
        for section, schemaD in CONFIG_SCHEMA.items():
            sectionD = configD.get(section, {}) or {}
            if not isinstance(sectionD, dict):
                raise ValidationError("Config section %s must be a mapping" % section)
            for ky in sectionD:
                if ky not in schemaD:
                    raise ValidationError("Unknown config key %s.%s" % (section, ky))
            rD[section] = {}
            for ky, (typeName, default) in schemaD.items():
                dottedKey = "%s.%s" % (section, ky)
                if ky in sectionD and sectionD[ky] is not None:
                    rD[section][ky] = _coerce(dottedKey, typeName, sectionD[ky])
                elif default is REQUIRED:
                    raise ValidationError("Missing required config key %s" % dottedKey)
                else:
                    rD[section][ky] = copy.deepcopy(default)
        #
        mT, gT = rD["model"]["T"], rD["grid"]["T"]
        if mT is not None and gT is not None and mT != gT:
            raise ValidationError("Config keys model.T (%r) and grid.T (%r) disagree" % (mT, gT))
        horizon = mT if mT is not None else (gT if gT is not None else DEFAULT_T)
        rD["model"]["T"] = rD["grid"]["T"] = horizon
        if rD["rate"]["seed"] is None:
            rD["rate"]["seed"] = rD["mc"]["seed"]
        return rD

    def __validate(self):
        mD = self.__configD["model"]
        family = mD["family"]
        if family not in FAMILY_KEYS:
            raise ValidationError("Unknown model family model.family=%r" % family)
        requiredL = list(FAMILY_KEYS[family])
        if family == "exponential_vol":
            dyn = mD["dynamics"] or "reflected_bm_drift"
            if dyn not in ("reflected_ou", "reflected_bm_drift"):
                raise ValidationError("Unknown volatility dynamics model.dynamics=%r" % dyn)
            mD["dynamics"] = dyn
            requiredL.extend(ky for ky in FAMILY_KEYS[dyn] if ky not in requiredL)
        elif mD["dynamics"] is not None:
            raise ValidationError("Config key model.dynamics applies to exponential_vol only")
        for ky in requiredL:
            if mD[ky] is None:
                raise ValidationError("Missing required config key model.%s for family %s" % (ky, family))
        self.modelSpec()
        self.grid()
        self.optimizerConfig()
        #
        mcD = self.__configD["mc"]
        if mcD["n_replicas"] < 2:
            raise ValidationError("Config key mc.n_replicas must be at least 2, got %r" % mcD["n_replicas"])
        if mcD["block_size"] < 1:
            raise ValidationError("Config key mc.block_size must be positive, got %r" % mcD["block_size"])
        if mcD["seed"] < 0:
            raise ValidationError("Config key mc.seed must be nonnegative, got %r" % mcD["seed"])
        for ky in ("eps", "eps_ladder"):
            if not mcD[ky] or any(not 0.0 < e for e in mcD[ky]):
                raise ValidationError("Config key mc.%s must hold positive values, got %r" % (ky, mcD[ky]))
        rtD = self.__configD["rate"]
        if rtD["target_kind"] not in TARGET_KINDS:
            raise ValidationError("Config key rate.target_kind must be one of %s, got %r" % (", ".join(TARGET_KINDS), rtD["target_kind"]))
        if rtD["n_points"] < 2:
            raise ValidationError("Config key rate.n_points must be at least 2, got %r" % rtD["n_points"])
        if self.__configD["option"]["kind"] is not None:
            self.optionSpec()
        for fmt in self.__configD["output"]["formats"]:
            if fmt not in OUTPUT_FORMATS:
                raise ValidationError("Config key output.formats holds unknown format %r" % fmt)

    def applyOverrides(self, seed=None, outDir=None):
        """Command line overrides: --seed replaces both mc.seed and rate.seed."""
        if seed is not None:
            if int(seed) < 0:
                raise ValidationError("Seed override must be nonnegative, got %r" % seed)
            self.__configD["mc"]["seed"] = int(seed)
            self.__configD["rate"]["seed"] = int(seed)
        if outDir is not None:
            self.__configD["output"]["directory"] = str(outDir)
        self.__validate()

    def get(self, section, key):
        return self.__configD[section][key]

    def section(self, section):
        return copy.deepcopy(self.__configD[section])

    def toDict(self):
        return copy.deepcopy(self.__configD)

    def modelSpec(self):
        return modelFromConfig(self.__configD["model"])

    def grid(self):
        gD = self.__configD["grid"]
        return TimeGrid(gD["T"], gD["n_steps"])

    def optimizerConfig(self, numProc=1):
        rtD = self.__configD["rate"]
        return OptimizerConfig(
            nStarts=rtD["n_starts"],
            maxIterations=rtD["max_iterations"],
            gradientTolerance=rtD["gradient_tolerance"],
            finiteDifferenceStep=rtD["finite_difference_step"],
            startScale=rtD["start_scale"],
            constraintPenaltySchedule=rtD["constraint_penalty_schedule"],
            seed=rtD["seed"],
            timeOut=rtD["time_out"],
            numProc=numProc,
        )

    def optionSpec(self):
        oD = self.__configD["option"]
        if oD["kind"] is None or oD["K"] is None:
            raise ValidationError("Config keys option.kind and option.K are required for pricing")
        return OptionSpec(oD["kind"], oD["K"], G=oD["G"])

    def statisticParams(self):
        """Parameters for mc.statistic; discounted_payoff takes its payoff from the option section."""
        mcD = self.__configD["mc"]
        if mcD["statistic"] == "discounted_payoff":
            return self.optionSpec().toDict()
        return {ky: mcD[ky] for ky in ("level", "direction", "K", "knock", "alpha") if mcD[ky] is not None}
