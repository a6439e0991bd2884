"""Whole-apparatus simulation: sources into fusions into detectors.

Builds the multi-source interferometer over tagged modes, propagates a
classical ensemble of amplitude states through the fusion splitters and
analyzers, and turns the result into exact outcome probabilities or
Poisson-sampled coincidence histograms.

Imperfect interference enters as two scalar overlaps. The synthesizer
overlap dephases each source's two emission processes against each
other; the fusion overlap splits the run into a branch where photons
from different sources interfere at the splitters and a branch where
every photon keeps a mark identifying its source. Weights multiply, so
any cross-source coherence in the output carries the product of all the
overlaps involved.
"""

from __future__ import annotations

import functools
import itertools
import math
import typing
import zlib
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, ExperimentConfig
from .elements import (
    analyzer_matrix,
    apply_element,
    element_on,
    pbs_matrix,
    phase_matrix,
    waveplate_angles,
)
from .fock import (
    AmplitudeState,
    ModeLabel,
    ModeRegistry,
    map_modes,
    registry_from,
    tensor_product,
)
from .sources import (
    TAG_BROAD,
    TAG_NARROW,
    PdcSource,
    emission_sector,
    source_ensemble,
    source_mode_labels,
)
from .topology import (
    FusionTopology,
    chain_topology,
    pattern_admits_coincidence,
    single_source_topology,
    star_topology,
)

__all__ = [
    "MeasurementSetting",
    "DetectionPattern",
    "CoincidenceHistogram",
    "Apparatus",
    "hv_setting",
    "k_setting",
    "angle_setting",
    "setting_from_label",
    "analyzer_waveplate_settings",
    "assemble_apparatus",
    "build_apparatus",
    "ghz_projector_sector",
    "absolute_outcome_distribution",
    "outcome_distribution",
    "emission_pattern_probability",
    "CalibratedOverlaps",
    "parity_visibility",
    "synthesizer_visibility",
    "fusion_visibility",
    "calibrate_overlaps",
    "monte_carlo_counts",
    "coincidence_unit_filter",
    "all_detection_patterns",
    "histogram_to_lines",
    "histogram_from_lines",
]


# ---- Measurement settings ----


@dataclass(frozen=True)
class MeasurementSetting:
    """Analyzer configuration for one run: a basis angle per output arm,
    or the computational basis when angles is None."""

    label: str
    angles: tuple | None = None

    def __post_init__(self):
        if self.angles is not None:
            angles = tuple(float(a) for a in self.angles)
            object.__setattr__(self, "angles", angles)
            for a in angles:
                if not 0.0 <= a < 2 * math.pi:
                    raise ValueError(f"analyzer angle {a} outside [0, 2*pi)")

    @property
    def symbols(self) -> tuple:
        return ("H", "V") if self.angles is None else ("+", "-")


def hv_setting() -> MeasurementSetting:
    return MeasurementSetting("HV", None)


def k_setting(k: int, n_arms: int = 8) -> MeasurementSetting:
    """Every arm analyzed at angle k*pi/8."""
    if not isinstance(k, int) or not 0 <= k <= 15:
        raise ValueError("k must be an integer in 0..15")
    return MeasurementSetting(f"k{k}", (k * math.pi / 8,) * n_arms)


def angle_setting(angles, label: str = "custom") -> MeasurementSetting:
    return MeasurementSetting(label, tuple(angles))


def setting_from_label(label: str, n_arms: int = 8) -> MeasurementSetting:
    if label == "HV":
        return hv_setting()
    if label.startswith("k") and label[1:].isdigit():
        return k_setting(int(label[1:]), n_arms)
    raise ValueError(f"unknown setting label {label!r}")


def analyzer_waveplate_settings(setting: MeasurementSetting):
    """Per-arm (quarter-wave, half-wave) plate angles realizing the
    setting, or None per arm in the computational basis."""
    if setting.angles is None:
        return None
    return tuple(waveplate_angles(a) for a in setting.angles)


# ---- Detection-side types ----


_PATTERN_SYMBOLS = frozenset("HV+-")


@dataclass(frozen=True, order=True)
class DetectionPattern:
    """One symbol per output arm, arms in ascending label order."""

    bits: str

    def __post_init__(self):
        if not self.bits or not set(self.bits) <= _PATTERN_SYMBOLS:
            raise ValueError(f"bad pattern {self.bits!r}")
        if not (set(self.bits) <= {"H", "V"} or set(self.bits) <= {"+", "-"}):
            raise ValueError(f"pattern {self.bits!r} mixes basis symbols")

    def __str__(self) -> str:
        return self.bits

    def count(self, symbol: str) -> int:
        return self.bits.count(symbol)


def all_detection_patterns(n_arms: int, symbols=("H", "V")) -> list:
    """All 2^n patterns; the first arm's symbol varies slowest."""
    first, second = symbols
    out = []
    for i in range(2**n_arms):
        bits = "".join(
            second if (i >> (n_arms - 1 - j)) & 1 else first for j in range(n_arms)
        )
        out.append(DetectionPattern(bits))
    return out


@dataclass(frozen=True)
class CoincidenceHistogram:
    setting: MeasurementSetting
    counts: dict
    duration_s: float
    seed: int

    def __post_init__(self):
        widths = {len(p.bits) for p in self.counts}
        if len(widths) > 1:
            raise ValueError("histogram mixes pattern widths")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative count")
        if self.duration_s <= 0:
            raise ValueError("duration must be positive")

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def coincidence_unit_filter(fired, arms, symbols=("H", "V")):
    """Reduce a set of fired logical detectors to a pattern, or discard.

    fired holds (arm, symbol) pairs. Accepts exactly when every arm has
    exactly one fired detector; an arm with both detectors up (a nine-
    or-more-photon signature) or a missing arm discards the event.
    """
    fired = set(fired)
    allowed = {(arm, s) for arm in arms for s in symbols}
    stray = fired - allowed
    if stray:
        raise ValueError(f"unknown detectors {sorted(stray)}")
    bits = []
    for arm in arms:
        hits = [s for s in symbols if (arm, s) in fired]
        if len(hits) != 1:
            return None
        bits.append(hits[0])
    return DetectionPattern("".join(bits))


# ---- Apparatus ----


@dataclass(frozen=True)
class Apparatus:
    """The assembled interferometer plus its detection parameters.

    registry holds the tagged source modes (8 per source). The fusion
    and compensation optics are kept both over plain arm/polarization
    modes (interfering branch) and over source-marked modes (the
    distinguishable branch); both describe the same physical elements.
    """

    topology: FusionTopology
    sources: tuple
    fusion_overlap: float
    detector_efficiency: float
    repetition_rate_hz: float
    truncation_pairs: int
    registry: ModeRegistry
    output_arms: tuple
    compensator_phase: float
    fusion_elements: tuple
    plain_registry: ModeRegistry = field(repr=False)
    marked_registry: ModeRegistry = field(repr=False)
    marked_fusion_elements: tuple = field(repr=False)
    compensator_elements: tuple = field(repr=False)
    marked_compensator_elements: tuple = field(repr=False)
    # memo for computed outcome distributions; keyed by setting
    _distribution_cache: dict = field(
        default_factory=dict, repr=False, compare=False
    )

    @property
    def n_arms(self) -> int:
        return len(self.output_arms)

    @property
    def n_detectors(self) -> int:
        return 2 * self.n_arms

    def arm_tag(self, arm):
        """The wavepacket tag an arm carries before fusion."""
        for source in self.sources:
            if arm == source.arm_a:
                return TAG_NARROW
            if arm == source.arm_b:
                return TAG_BROAD
        raise ValueError(f"arm {arm!r} not in this apparatus")

    def arm_mark(self, arm) -> str:
        for i, source in enumerate(self.sources):
            if arm in (source.arm_a, source.arm_b):
                return f"m{i + 1}"
        raise ValueError(f"arm {arm!r} not in this apparatus")


def _fusion_elements(registry, edges, tags) -> tuple:
    els = []
    for x, y in edges:
        for tag in tags:
            labels = [ModeLabel(a, pol, tag) for a in (x, y) for pol in ("H", "V")]
            els.append(element_on(registry, labels, pbs_matrix(), f"fuse-{x}-{y}"))
    return tuple(els)


def _phase_elements(registry, arm, phase, tags) -> tuple:
    return tuple(
        element_on(
            registry,
            [ModeLabel(arm, "V", tag)],
            phase_matrix(phase),
            f"compensator-{arm}",
        )
        for tag in tags
    )


def _arm_groups(registry, output_arms):
    """Per arm: (indices of H-labeled modes, indices of V-labeled modes)."""
    groups = []
    for arm in output_arms:
        h = [i for i, lab in enumerate(registry) if lab.arm == arm and lab.pol == "H"]
        v = [i for i, lab in enumerate(registry) if lab.arm == arm and lab.pol == "V"]
        groups.append((tuple(h), tuple(v)))
    return tuple(groups)


def _calibrate_compensator(topology, plain_registry, fusion_elements, output_arms):
    """Phase that realigns the all-V fused amplitude with the all-H one.

    Probes with one ideal pair per source and reads the two post-selected
    amplitudes; the compensator plate on the first arm's V modes then
    cancels the splitter reflection phases.
    """
    probe = None
    for arm_a, arm_b in topology.sources:
        src = PdcSource(arm_a=arm_a, arm_b=arm_b, pair_amplitude=0.2, truncation_pairs=1)
        piece = emission_sector(src, 1)
        own = {arm_a: TAG_NARROW, arm_b: TAG_BROAD}
        local = registry_from(
            [ModeLabel(arm, pol, "") for arm in (arm_a, arm_b) for pol in ("H", "V")]
        )
        piece = map_modes(
            piece,
            local,
            lambda lab: ModeLabel(lab.arm, lab.pol, "")
            if lab.tag == own.get(lab.arm)
            else None,
        )
        probe = piece if probe is None else tensor_product(probe, piece)
    probe = map_modes(probe, plain_registry, lambda lab: lab)
    for el in fusion_elements:
        probe = apply_element(probe, el)
    width = len(plain_registry)
    all_h = [0] * width
    all_v = [0] * width
    for arm in output_arms:
        all_h[plain_registry.index(ModeLabel(arm, "H", ""))] = 1
        all_v[plain_registry.index(ModeLabel(arm, "V", ""))] = 1
    amp_h = probe.terms.get(tuple(all_h), 0j)
    amp_v = probe.terms.get(tuple(all_v), 0j)
    if abs(amp_h) < 1e-12 or abs(amp_v) < 1e-12:
        return 0.0
    phase = math.atan2(amp_h.imag, amp_h.real) - math.atan2(amp_v.imag, amp_v.real)
    return phase % (2 * math.pi)


def assemble_apparatus(
    topology: FusionTopology,
    *,
    pair_probability: float,
    synthesizer_overlap: float = 1.0,
    fusion_overlap: float = 1.0,
    detector_efficiency: float = 1.0,
    repetition_rate_hz: float = 76.0e6,
    truncation_pairs: int | None = None,
) -> Apparatus:
    """Wire up sources and optics for a topology.

    truncation_pairs bounds the total pair count across all sources;
    the default resolves exactly the wanted one-pair-per-source events.
    """
    if not 0.0 <= fusion_overlap <= 1.0:
        raise ValueError("fusion_overlap must lie in [0, 1]")
    if not 0.0 < detector_efficiency <= 1.0:
        raise ValueError("detector_efficiency must lie in (0, 1]")
    if repetition_rate_hz <= 0:
        raise ValueError("repetition rate must be positive")
    total = truncation_pairs if truncation_pairs is not None else topology.n_sources
    if total < 1:
        raise ValueError("truncation_pairs must be at least 1")
    sources = tuple(
        PdcSource(
            arm_a=arm_a,
            arm_b=arm_b,
            pair_amplitude=math.sqrt(pair_probability),
            spectral_overlap=synthesizer_overlap,
            truncation_pairs=total,
        )
        for arm_a, arm_b in topology.sources
    )
    registry = registry_from([lab for s in sources for lab in source_mode_labels(s)])
    output_arms = tuple(sorted(arm for pair in topology.sources for arm in pair))
    plain_registry = registry_from(
        [ModeLabel(arm, pol, "") for arm in output_arms for pol in ("H", "V")]
    )
    marks = tuple(f"m{i + 1}" for i in range(len(sources)))
    marked_registry = registry_from(
        [
            ModeLabel(arm, pol, mark)
            for arm in output_arms
            for pol in ("H", "V")
            for mark in marks
        ]
    )
    fusion_elements = _fusion_elements(plain_registry, topology.fusion_edges, ("",))
    marked_fusion = _fusion_elements(marked_registry, topology.fusion_edges, marks)
    phase = _calibrate_compensator(topology, plain_registry, fusion_elements, output_arms)
    first_arm = output_arms[0]
    return Apparatus(
        topology=topology,
        sources=sources,
        fusion_overlap=fusion_overlap,
        detector_efficiency=detector_efficiency,
        repetition_rate_hz=repetition_rate_hz,
        truncation_pairs=total,
        registry=registry,
        output_arms=output_arms,
        compensator_phase=phase,
        fusion_elements=fusion_elements,
        plain_registry=plain_registry,
        marked_registry=marked_registry,
        marked_fusion_elements=marked_fusion,
        compensator_elements=_phase_elements(plain_registry, first_arm, phase, ("",)),
        marked_compensator_elements=_phase_elements(
            marked_registry, first_arm, phase, marks
        ),
    )


def build_apparatus(config: ExperimentConfig) -> Apparatus:
    """Apparatus for a validated config; topology from shape and count."""
    count = config.sources.count
    shape = config.topology.shape
    if shape == "custom":
        topo = FusionTopology(
            config.topology.sources, config.topology.fusion_edges, "custom"
        )
        if topo.n_sources != count:
            raise ConfigError(
                [f"sources.count={count} but topology lists {topo.n_sources} sources"]
            )
    elif count == 1:
        topo = single_source_topology()
    elif shape == "star":
        topo = star_topology(count)
    else:
        topo = chain_topology(count)
    return assemble_apparatus(
        topo,
        pair_probability=config.sources.pair_probability,
        synthesizer_overlap=config.sources.synthesizer_overlap,
        fusion_overlap=config.sources.fusion_overlap,
        detector_efficiency=config.detection.efficiency,
        repetition_rate_hz=config.detection.repetition_rate_hz,
        truncation_pairs=config.sources.truncation_pairs,
    )


# ---- Post-selection ----


def ghz_projector_sector(state: AmplitudeState) -> AmplitudeState:
    """Restriction to exactly one photon in every arm, unnormalized.

    The squared norm of the result is the post-selection success
    probability of the input.
    """
    arms = []
    for lab in state.registry:
        if lab.arm not in arms:
            arms.append(lab.arm)
    groups = [
        [i for i, lab in enumerate(state.registry) if lab.arm == arm] for arm in arms
    ]
    kept = {
        occ: amp
        for occ, amp in state.terms.items()
        if all(sum(occ[i] for i in g) == 1 for g in groups)
    }
    return AmplitudeState(state.registry, kept, state.truncation_order)


# ---- Ensemble assembly ----


def _emission_patterns(apparatus: Apparatus):
    topo = apparatus.topology
    k = topo.n_sources
    for order in range(k, apparatus.truncation_pairs + 1):
        for counts in itertools.product(range(order + 1), repeat=k):
            if sum(counts) == order and pattern_admits_coincidence(topo, counts):
                yield counts


def _relabel_to(apparatus: Apparatus, state: AmplitudeState, marked: bool):
    own = {}
    mark = {}
    for i, source in enumerate(apparatus.sources):
        own[source.arm_a] = TAG_NARROW
        own[source.arm_b] = TAG_BROAD
        mark[source.arm_a] = mark[source.arm_b] = f"m{i + 1}"
    if marked:
        registry = apparatus.marked_registry
        relabel = lambda lab: (
            ModeLabel(lab.arm, lab.pol, mark[lab.arm])
            if lab.tag == own.get(lab.arm)
            else None
        )
    else:
        registry = apparatus.plain_registry
        relabel = lambda lab: (
            ModeLabel(lab.arm, lab.pol, "") if lab.tag == own.get(lab.arm) else None
        )
    return map_modes(state, registry, relabel)


def _member_states(apparatus: Apparatus):
    """Yield (weight, state, marked?) members after fusion and compensation.

    The weight of a member is the product of its per-source ensemble
    weights and the fusion-branch weight; states are unnormalized, so a
    member's accepted probability is weight times the detection value of
    its amplitudes.
    """
    for counts in _emission_patterns(apparatus):
        yield from _members_for_pattern(apparatus, counts)


def _members_for_pattern(apparatus: Apparatus, counts):
    gamma_f = apparatus.fusion_overlap
    cap = 2 * apparatus.truncation_pairs
    per_source = [
        source_ensemble(source, n)
        for source, n in zip(apparatus.sources, counts)
    ]
    for combo in itertools.product(*per_source):
        weight = 1.0
        for w, _ in combo:
            weight *= w
        joint = functools.reduce(
            lambda a, b: tensor_product(a, b, cap), (st for _, st in combo)
        )
        if gamma_f > 0.0:
            state = _relabel_to(apparatus, joint, marked=False)
            for el in apparatus.fusion_elements + apparatus.compensator_elements:
                state = apply_element(state, el)
            yield weight * gamma_f, state, False
        if gamma_f < 1.0:
            state = _relabel_to(apparatus, joint, marked=True)
            for el in (
                apparatus.marked_fusion_elements
                + apparatus.marked_compensator_elements
            ):
                state = apply_element(state, el)
            yield weight * (1.0 - gamma_f), state, True


def _coincidence_support(state: AmplitudeState, groups) -> AmplitudeState:
    """Drop terms with any empty arm; they can never fire all detectors."""
    kept = {
        occ: amp
        for occ, amp in state.terms.items()
        if all(sum(occ[i] for i in h) + sum(occ[i] for i in v) for h, v in groups)
    }
    return AmplitudeState(state.registry, kept, state.truncation_order)


# ---- Detection ----


def _analyzer_elements(registry, output_arms, setting: MeasurementSetting):
    if setting.angles is None:
        return ()
    tags = []
    for lab in registry:
        if lab.tag not in tags:
            tags.append(lab.tag)
    els = []
    for arm, theta in zip(output_arms, setting.angles):
        for tag in tags:
            labels = [ModeLabel(arm, "H", tag), ModeLabel(arm, "V", tag)]
            els.append(
                element_on(registry, labels, analyzer_matrix(theta), f"analyzer-{arm}")
            )
    return tuple(els)


def _detection_vector(state, weight, groups, xi, vector):
    """Accumulate accepted-pattern probabilities of one member.

    Per term, only the per-arm photon counts at the two detector ports
    matter: a port with n photons fires with probability 1-(1-xi)^n,
    independently per photon. Terms are first merged by count profile;
    distinct mode occupations never interfere in the detectors.
    """
    profiles: dict = {}
    for occ, amp in state.terms.items():
        prof = tuple(
            (sum(occ[i] for i in h), sum(occ[i] for i in v)) for h, v in groups
        )
        w = abs(amp) ** 2
        profiles[prof] = profiles.get(prof, 0.0) + w
    miss = 1.0 - xi
    for prof, w in profiles.items():
        vec = np.array([weight * w])
        for n_first, n_second in prof:
            silent_first = miss**n_first
            silent_second = miss**n_second
            f_first = (1.0 - silent_first) * silent_second
            f_second = (1.0 - silent_second) * silent_first
            vec = np.concatenate([vec * f_first, vec * f_second])
        vector += vec


def absolute_outcome_distribution(
    apparatus: Apparatus, setting: MeasurementSetting
) -> dict:
    """Per-pulse probability of each accepted pattern, before conditioning.

    Patterns where some arm fires both detectors or none are discarded by
    construction, so the values sum to the total accepted probability.
    """
    if setting.angles is not None and len(setting.angles) != apparatus.n_arms:
        raise ValueError(
            f"setting has {len(setting.angles)} angles for {apparatus.n_arms} arms"
        )
    key = (setting.label, setting.angles)
    cached = apparatus._distribution_cache.get(key)
    if cached is not None:
        return dict(cached)
    groups = {
        False: _arm_groups(apparatus.plain_registry, apparatus.output_arms),
        True: _arm_groups(apparatus.marked_registry, apparatus.output_arms),
    }
    analyzers = {
        False: _analyzer_elements(apparatus.plain_registry, apparatus.output_arms, setting),
        True: _analyzer_elements(apparatus.marked_registry, apparatus.output_arms, setting),
    }
    xi = apparatus.detector_efficiency
    vector = np.zeros(2**apparatus.n_arms)
    for weight, state, marked in _member_states(apparatus):
        state = _coincidence_support(state, groups[marked])
        if not state.terms:
            continue
        for el in analyzers[marked]:
            state = apply_element(state, el)
        _detection_vector(state, weight, groups[marked], xi, vector)
    patterns = all_detection_patterns(apparatus.n_arms, setting.symbols)
    result = {pat: float(v) for pat, v in zip(patterns, vector)}
    apparatus._distribution_cache[key] = result
    return dict(result)


def outcome_distribution(apparatus: Apparatus, setting: MeasurementSetting) -> dict:
    """Conditional distribution over patterns given an accepted event."""
    absolute = absolute_outcome_distribution(apparatus, setting)
    total = sum(absolute.values())
    if total <= 0.0:
        raise ValueError("no accepted coincidences under this truncation")
    return {pat: p / total for pat, p in absolute.items()}


def emission_pattern_probability(apparatus: Apparatus, pairs_per_source) -> float:
    """Accepted probability contributed by one emission pattern alone.

    Takes no counting shortcut: the pattern's state is pushed through the
    fusion optics and detectors whether or not a quick occupancy argument
    would admit it, so the result is an independent check on the
    enumeration in the topology module.
    """
    counts = tuple(int(n) for n in pairs_per_source)
    if len(counts) != len(apparatus.sources):
        raise ValueError("pattern length does not match the source count")
    if any(n < 0 for n in counts):
        raise ValueError("negative pair count")
    if sum(counts) > apparatus.truncation_pairs:
        raise ValueError("pattern exceeds the pair truncation")
    groups = {
        False: _arm_groups(apparatus.plain_registry, apparatus.output_arms),
        True: _arm_groups(apparatus.marked_registry, apparatus.output_arms),
    }
    xi = apparatus.detector_efficiency
    vector = np.zeros(2**apparatus.n_arms)
    for weight, state, marked in _members_for_pattern(apparatus, counts):
        state = _coincidence_support(state, groups[marked])
        if state.terms:
            _detection_vector(state, weight, groups[marked], xi, vector)
    return float(vector.sum())


# ---- Overlap calibration ----


class CalibratedOverlaps(typing.NamedTuple):
    synthesizer_overlap: float
    fusion_overlap: float


def parity_visibility(apparatus: Apparatus) -> float:
    """Signed parity correlation at analyzer angle zero, conditioned on
    an accepted coincidence; the simulated analog of an interference
    visibility measurement on this apparatus."""
    dist = outcome_distribution(apparatus, k_setting(0, apparatus.n_arms))
    return sum(((-1) ** pat.count("-")) * p for pat, p in dist.items())


def synthesizer_visibility(
    overlap: float,
    *,
    pair_probability: float,
    efficiency: float,
    truncation_pairs: int = 2,
) -> float:
    """Two-fold diagonal-basis visibility of one source at running power.

    Includes multi-pair dilution, so the result sits below the intrinsic
    overlap whenever truncation_pairs > 1.
    """
    app = assemble_apparatus(
        single_source_topology(),
        pair_probability=pair_probability,
        synthesizer_overlap=overlap,
        detector_efficiency=efficiency,
        truncation_pairs=truncation_pairs,
    )
    return parity_visibility(app)


def fusion_visibility(
    fusion_overlap: float,
    synthesizer_overlap: float,
    *,
    pair_probability: float,
    efficiency: float,
    truncation_pairs: int = 3,
) -> float:
    """Four-fold parity visibility of two sources fused on one splitter,
    at running power: the simulated analog of the alignment interference
    check between independent photons."""
    app = assemble_apparatus(
        star_topology(2),
        pair_probability=pair_probability,
        synthesizer_overlap=synthesizer_overlap,
        fusion_overlap=fusion_overlap,
        detector_efficiency=efficiency,
        truncation_pairs=truncation_pairs,
    )
    return parity_visibility(app)


def _invert_monotone(func, target, iterations=60):
    lo, hi = 0.0, 1.0
    if func(hi) < target:
        raise ValueError(
            f"target visibility {target} unreachable at this brightness"
        )
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def calibrate_overlaps(
    *,
    pair_probability: float,
    efficiency: float,
    synthesizer_target: float = 0.94,
    fusion_target: float = 0.76,
) -> CalibratedOverlaps:
    """Intrinsic overlaps that reproduce measured visibilities.

    Interference visibilities are quoted at running pump power, where
    multi-pair emission already dilutes them; feeding them to the model
    unchanged would double-count that noise. This inverts the two
    simulated alignment measurements by bisection: first the single
    source against its diagonal-basis visibility, then the two-source
    fusion against the independent-photon visibility.
    """
    gs = _invert_monotone(
        lambda g: synthesizer_visibility(
            g, pair_probability=pair_probability, efficiency=efficiency
        ),
        synthesizer_target,
    )
    gf = _invert_monotone(
        lambda g: fusion_visibility(
            g, gs, pair_probability=pair_probability, efficiency=efficiency
        ),
        fusion_target,
    )
    return CalibratedOverlaps(synthesizer_overlap=gs, fusion_overlap=gf)


# ---- Counting ----


def monte_carlo_counts(
    apparatus: Apparatus,
    setting: MeasurementSetting,
    duration_s: float,
    seed: int,
) -> CoincidenceHistogram:
    """Poisson counts per pattern over a run of the given duration.

    Each pattern accumulates at repetition rate times its absolute
    probability. The stream is derived from (seed, setting label), so a
    fixed seed reproduces the histogram bit for bit and different
    settings draw independently.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    absolute = absolute_outcome_distribution(apparatus, setting)
    stream = np.random.SeedSequence([seed, zlib.crc32(setting.label.encode())])
    rng = np.random.default_rng(stream)
    counts = {}
    for pat, p in absolute.items():
        mean = apparatus.repetition_rate_hz * p * duration_s
        counts[pat] = int(rng.poisson(mean))
    return CoincidenceHistogram(
        setting=setting, counts=counts, duration_s=float(duration_s), seed=seed
    )


# ---- Histogram files ----


def histogram_to_lines(hist: CoincidenceHistogram) -> list:
    """Header 'setting,duration,seed', then one 'pattern,count' per line."""
    lines = [f"{hist.setting.label},{hist.duration_s!r},{hist.seed}"]
    for pat in sorted(hist.counts):
        lines.append(f"{pat.bits},{hist.counts[pat]}")
    return lines


def histogram_from_lines(lines) -> CoincidenceHistogram:
    lines = list(lines)
    if not lines:
        raise ValueError("empty histogram data")
    head = lines[0].split(",")
    if len(head) != 3:
        raise ValueError(f"bad histogram header {lines[0]!r}")
    label, duration, seed = head
    counts = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        bits, _, count = line.partition(",")
        value = float(count)
        counts[DetectionPattern(bits)] = int(value) if value.is_integer() else value
    if not counts:
        raise ValueError("histogram has no pattern rows")
    n_arms = len(next(iter(counts)).bits)
    return CoincidenceHistogram(
        setting=setting_from_label(label, n_arms),
        counts=counts,
        duration_s=float(duration),
        seed=int(seed),
    )
