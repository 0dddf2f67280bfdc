"""Forward/backward field propagation, weak values and encounter probabilities
in (nested) Mach-Zehnder interferometers."""

from .netgraph import (PRESETS, Kind, ModulatorSpec, NetlistError, Network, build_preset, close,
                       parse_network, reverse, serialize_network, validate)
from .propagate import check_cut_sum, intensities, propagate
from .tsvf import DarkPortDivergence, abl_normalize, backward_field, encounter, encounter_sum_rules, weak_values

__all__ = [
    "PRESETS", "Kind", "ModulatorSpec", "NetlistError", "Network", "build_preset", "close", "parse_network",
    "reverse", "serialize_network", "validate", "check_cut_sum", "intensities", "propagate",
    "DarkPortDivergence", "abl_normalize", "backward_field", "encounter", "encounter_sum_rules", "weak_values",
]
