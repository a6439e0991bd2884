"""Exact simulation of multi-pair photon fusion interferometry."""

from .analysis import (
    ObservableResult,
    PopulationSummary,
    WitnessReport,
    fidelity_witness,
    m_k_expectation,
    poisson_propagate,
    populations,
    witness_from_histograms,
)
from .config import ConfigError, ExperimentConfig, load_config, save_config
from .experiment import (
    Apparatus,
    CoincidenceHistogram,
    DetectionPattern,
    MeasurementSetting,
    absolute_outcome_distribution,
    assemble_apparatus,
    build_apparatus,
    calibrate_overlaps,
    emission_pattern_probability,
    fusion_visibility,
    histogram_from_lines,
    histogram_to_lines,
    hv_setting,
    k_setting,
    monte_carlo_counts,
    outcome_distribution,
    setting_from_label,
    synthesizer_visibility,
)
from .fock import (
    AmplitudeState,
    ModeLabel,
    ModeRegistry,
    apply_creation,
    apply_pair_creation,
    inner_product,
    map_modes,
    product_state,
    registry_from,
    state_from_lines,
    state_to_lines,
    tensor_product,
    vacuum,
)
from .sources import PdcSource, bell_synthesizer, pdc_emit, set_pair_distinguishability
from .topology import (
    FusionTopology,
    chain_topology,
    enumerate_error_terms,
    graph_state_edges,
    n_fold_rate,
    star_topology,
)

__all__ = [
    "AmplitudeState",
    "Apparatus",
    "CoincidenceHistogram",
    "ConfigError",
    "DetectionPattern",
    "ExperimentConfig",
    "FusionTopology",
    "MeasurementSetting",
    "ModeLabel",
    "ModeRegistry",
    "ObservableResult",
    "PdcSource",
    "PopulationSummary",
    "WitnessReport",
    "absolute_outcome_distribution",
    "apply_creation",
    "apply_pair_creation",
    "assemble_apparatus",
    "bell_synthesizer",
    "build_apparatus",
    "calibrate_overlaps",
    "chain_topology",
    "emission_pattern_probability",
    "enumerate_error_terms",
    "fidelity_witness",
    "fusion_visibility",
    "graph_state_edges",
    "histogram_from_lines",
    "histogram_to_lines",
    "hv_setting",
    "inner_product",
    "k_setting",
    "load_config",
    "m_k_expectation",
    "map_modes",
    "monte_carlo_counts",
    "n_fold_rate",
    "outcome_distribution",
    "pdc_emit",
    "poisson_propagate",
    "populations",
    "product_state",
    "registry_from",
    "save_config",
    "setting_from_label",
    "star_topology",
    "state_from_lines",
    "state_to_lines",
    "synthesizer_visibility",
    "tensor_product",
    "vacuum",
    "witness_from_histograms",
]
