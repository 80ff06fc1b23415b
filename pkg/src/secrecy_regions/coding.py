"""
Small-block wiretap codebooks with exact equivocation and error probability.

A plan fixes the binning rates of the double-binned superposition code from a
decomposition P(u) P(v1, v2 | u) P(x | v1, v2):

    L11 = I(V1;Y1|U) - I(V1;Z,V2|U)     L12 = I(V1;Z|V2,U)
    L22 = I(V2;Y2|U) - I(V2;Z,V1|U)     L21 = I(V2;Z|V1,U)
    L3  = I(V1;V2|U)                    LU  = I(U;Z)

Layer 1 has 2^{n L11} bins of 2^{n L12} sub-bins of 2^{n L3} codewords and
layer 2 likewise; the cloud layer carries (W0, W10, W20) with 2^{n LU}
randomization codewords per message. Every block size is 2^{n rate} rounded
to the nearest integer, at least 1.

Equivocation and error probability are computed by summing over every output
sequence. Receivers use MAP decoding of the messages they need (lowest index
wins ties). Only the marginal kernels of the BCE are read.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse

from secrecy_regions.channel import (
    BceChannel,
    DiscreteChannel,
    Pmf,
    conditional_mutual_information_array,
    mutual_information_array,
)
from secrecy_regions.degraded import AuxiliaryDecomposition
from secrecy_regions.inner import InnerBoundDecomposition
from secrecy_regions.types import (
    BudgetExceeded,
    ConstructionError,
    DimensionMismatch,
    NumericalError,
    ValidationError,
    fail,
)

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]

MAX_OUTPUT_BITS = 24.0
MAX_CODEWORDS = 65536
MAX_BLOCK = 2**16
LAYER_TOLERANCE = 1e-12
INDEPENDENCE_TOLERANCE = 1e-12
CHUNK_ENTRIES = 2**22

Decomposition = InnerBoundDecomposition | AuxiliaryDecomposition


# =============================================================================
# Plans
# =============================================================================


@dataclass(frozen=True, slots=True)
class RateTargets:
    """Target rates in bits per use; W1 = (W10, W11) and W2 = (W20, W22)."""

    r0: float = 0.0
    r10: float = 0.0
    r11: float = 0.0
    r20: float = 0.0
    r22: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r0", "r10", "r11", "r20", "r22"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise fail(ValidationError(field=name, message=f"{value} must be >= 0"))

    @property
    def r1(self) -> float:
        return self.r10 + self.r11

    @property
    def r2(self) -> float:
        return self.r20 + self.r22

    def scaled(self, factor: float) -> RateTargets:
        return RateTargets(*(factor * v for v in (self.r0, self.r10, self.r11, self.r20, self.r22)))


def block_size(n: int, rate: float) -> int:
    """2^(n rate) rounded to the nearest integer, at least 1."""
    return max(1, math.floor(2.0 ** (n * rate) + 0.5))


@dataclass(frozen=True, slots=True)
class LayerStructure:
    bins: int
    sub_bins: int
    per_sub_bin: int

    @property
    def codewords(self) -> int:
        return self.bins * self.sub_bins * self.per_sub_bin


@dataclass(frozen=True, slots=True)
class CodeStructure:
    """Integer block sizes realized from a plan."""

    m0: int
    m10: int
    m20: int
    m11: int
    m22: int
    spread: int
    layer1: LayerStructure
    layer2: LayerStructure

    @property
    def message_shape(self) -> tuple[int, int, int, int, int]:
        """Axis order of the flat message index."""
        return self.m0, self.m10, self.m20, self.m11, self.m22

    @property
    def messages(self) -> int:
        return math.prod(self.message_shape)

    @property
    def clouds(self) -> int:
        return self.m0 * self.m10 * self.m20

    def realized_rates(self, n: int) -> tuple[float, float, float]:
        """(R0, R1, R2) actually carried: log2 of the message counts over n."""
        return (
            math.log2(self.m0) / n,
            math.log2(self.m10 * self.m11) / n,
            math.log2(self.m20 * self.m22) / n,
        )


@dataclass(frozen=True, slots=True)
class BinningPlan:
    """
    Binning rates for block length n, with the layer totals
    I(V1;Y1|U) and I(V2;Y2|U) they must add up to.

    ``valid`` records R11 >= L11 >= 0 and R22 >= L22 >= 0; invalid plans
    still build and run, without any secrecy expectation.
    """

    n: int
    targets: RateTargets
    l11: float
    l12: float
    l21: float
    l22: float
    l3: float
    lu: float = 0.0
    layer1_total: float | None = None
    layer2_total: float | None = None
    sizes: tuple[int, int, int, int] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise fail(ValidationError(field="n", message=f"{self.n} must be >= 1"))
        for name in ("l12", "l21", "l3", "lu"):
            if getattr(self, name) < -LAYER_TOLERANCE:
                raise fail(ValidationError(field=name, message="must be >= 0"))
        for total, parts, name in (
            (self.layer1_total, self.l11 + self.l12 + self.l3, "layer 1"),
            (self.layer2_total, self.l22 + self.l21 + self.l3, "layer 2"),
        ):
            if total is not None and abs(total - parts) > LAYER_TOLERANCE:
                raise fail(
                    ValidationError(
                        field="plan", message=f"{name} rates sum to {parts!r}, total is {total!r}"
                    )
                )

    @property
    def valid(self) -> bool:
        t = self.targets
        return all(
            rate >= binning - LAYER_TOLERANCE and binning >= -LAYER_TOLERANCE
            for rate, binning in ((t.r11, self.l11), (t.r22, self.l22))
        )

    def structure(self) -> CodeStructure:
        n, t = self.n, self.targets
        return CodeStructure(
            m0=block_size(n, t.r0),
            m10=block_size(n, t.r10),
            m20=block_size(n, t.r20),
            m11=block_size(n, t.r11),
            m22=block_size(n, t.r22),
            spread=block_size(n, max(0.0, self.lu)),
            layer1=_layer(n, t.r11, self.l11, self.l12, self.l3),
            layer2=_layer(n, t.r22, self.l22, self.l21, self.l3),
        )


def _layer(n: int, private: float, binning: float, sub: float, shared: float) -> LayerStructure:
    """Bins carry min(R, L) and the remainder of L moves into the sub-bins."""
    positive = max(0.0, binning)
    carried = min(private, positive)
    return LayerStructure(
        bins=block_size(n, carried),
        sub_bins=block_size(n, max(0.0, sub) + positive - carried),
        per_sub_bin=block_size(n, max(0.0, shared)),
    )


def _as_inner(dists: Decomposition) -> InnerBoundDecomposition:
    if isinstance(dists, AuxiliaryDecomposition):
        return InnerBoundDecomposition.from_auxiliary(dists)
    return dists


def plan_binning(
    bce: BceChannel, dists: Decomposition, n: int, targets: RateTargets
) -> BinningPlan:
    """
    Binning rates of ``dists`` on ``bce``. A degraded-region decomposition is
    embedded with V1 = X and V2 constant, so its R1 goes to R11 and R2 to R20.
    """
    dec = _as_inner(dists)
    if dec.sizes[3] != bce.input_size:
        raise fail(DimensionMismatch("plan_binning", bce.input_size, dec.sizes[3]))
    joint = dec.joint
    # Axes: U, V1, V2, X, output.
    t1 = joint[..., None] * bce.y1.kernel
    t2 = joint[..., None] * bce.y2.kernel
    tz = joint[..., None] * bce.z.kernel
    cmi = conditional_mutual_information_array
    v1_y1 = cmi(t1, [1], [4], [0])
    v2_y2 = cmi(t2, [2], [4], [0])
    plan = BinningPlan(
        n=n,
        targets=targets,
        l11=v1_y1 - cmi(tz, [1], [2, 4], [0]),
        l12=cmi(tz, [1], [4], [0, 2]),
        l21=cmi(tz, [2], [4], [0, 1]),
        l22=v2_y2 - cmi(tz, [2], [1, 4], [0]),
        l3=cmi(joint, [1], [2], [0]),
        lu=mutual_information_array(tz, [0], [4]),
        layer1_total=v1_y1,
        layer2_total=v2_y2,
        sizes=dec.sizes,
    )
    if not plan.valid:
        logger.warning(
            f"Binning plan outside R11 >= L11 >= 0, R22 >= L22 >= 0 "
            f"(L11={plan.l11:.6g}, L22={plan.l22:.6g}); no secrecy guarantee"
        )
    return plan


# =============================================================================
# Codebooks
# =============================================================================


def even_mapping(message: int, count: int, layer: LayerStructure) -> list[int]:
    """
    Codeword indices (bin, sub-bin, index) flattened, that may carry ``message``
    out of ``count`` messages.

    Messages go to bins round-robin. When a bin holds no more messages than
    sub-bins, each message owns the sub-bins congruent to its rank and any
    codeword in them; otherwise messages share sub-bins and split their
    codewords, wrapping when there are fewer codewords than messages.
    """
    bins, subs, per = layer.bins, layer.sub_bins, layer.per_sub_bin
    bin_index, rank = message % bins, message // bins
    per_bin = -(-count // bins)
    if per_bin <= subs:
        chosen_subs = [s for s in range(subs) if s % per_bin == rank]
        offsets = list(range(per))
    else:
        chosen_subs = [rank % subs]
        slot = rank // subs
        per_sub = -(-per_bin // subs)
        offsets = [t for t in range(per) if t % per_sub == slot] or [slot % per]
    return [(bin_index * subs + s) * per + t for s in chosen_subs for t in offsets]


@dataclass(frozen=True, slots=True, eq=False)
class WiretapCodebook:
    """
    Cloud and satellite codewords plus the encoder table.

    ``encoder`` is a sparse (messages x transmissions) matrix of encoder
    probabilities; ``transmissions`` holds, per transmission, the symbol
    sequence of (v1, v2) pair indices v1 * |V2| + v2, and ``columns`` its
    (cloud, randomization, layer-1 codeword, layer-2 codeword) indices.
    """

    plan: BinningPlan
    structure: CodeStructure
    seed: int
    u_words: IntArray
    v1_words: IntArray
    v2_words: IntArray
    encoder: sparse.csr_matrix
    transmissions: IntArray
    columns: IntArray
    x_given_pair: FloatArray
    pair_selection: str
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.plan.n

    def effective_kernel(self, channel: DiscreteChannel) -> FloatArray:
        """P(out | v1, v2) = sum_x P(x | v1, v2) P(out | x)."""
        return self.x_given_pair @ channel.kernel

    def bin_occupancy(self) -> tuple[int, ...]:
        """Distinct layer-1 messages the encoder sends through each layer-1 bin."""
        layer = self.structure.layer1
        entries = self.encoder.tocoo()
        w11 = np.unravel_index(entries.row, self.structure.message_shape)[3]
        bins = self.columns[entries.col, 2] // (layer.sub_bins * layer.per_sub_bin)
        pairs = np.unique(np.stack([bins, w11], axis=1).astype(np.int64), axis=0)
        counts = np.bincount(pairs[:, 0], minlength=layer.bins)
        return tuple(int(c) for c in counts)


def _draw(rng: np.random.Generator, conditional: FloatArray, given: IntArray) -> IntArray:
    """One symbol per entry of ``given`` from the rows of ``conditional``."""
    cumulative = np.cumsum(conditional, axis=1)[given]
    draws = rng.random(given.shape)
    indices = (draws[..., None] >= cumulative).sum(axis=-1)
    return np.minimum(indices, conditional.shape[1] - 1).astype(np.int64)


def _check_budget(structure: CodeStructure, max_codewords: int) -> None:
    blocks = {
        "messages": structure.messages,
        "cloud codewords": structure.clouds * structure.spread,
        "layer-1 codewords": structure.layer1.codewords,
        "layer-2 codewords": structure.layer2.codewords,
    }
    for name, size in blocks.items():
        if size > MAX_BLOCK:
            raise fail(BudgetExceeded(name, size, MAX_BLOCK))
    total = structure.clouds * structure.spread * (
        structure.layer1.codewords + structure.layer2.codewords
    )
    if total > max_codewords:
        raise fail(BudgetExceeded("codebook", total, max_codewords))


def generate_codebook(
    plan: BinningPlan,
    dists: Decomposition,
    seed: int,
    max_codewords: int = MAX_CODEWORDS,
) -> WiretapCodebook:
    """
    Draw every codeword i.i.d. from the decomposition and build the encoder.

    Pairs of satellite codewords are chosen uniformly when V1 and V2 are
    conditionally independent given U, and otherwise by the largest joint
    probability P(v1^n, v2^n | u^n).
    """
    dec = _as_inner(dists)
    if plan.sizes is not None and plan.sizes != dec.sizes:
        raise fail(ValidationError(field="dists", message=f"sizes {dec.sizes} != {plan.sizes}"))
    structure = plan.structure()
    _check_budget(structure, max_codewords)
    for name, layer, count in (
        ("layer 1", structure.layer1, structure.m11),
        ("layer 2", structure.layer2, structure.m22),
    ):
        if count < layer.bins:
            raise fail(
                ConstructionError(f"{name}: {count} messages leave empty bins of {layer.bins}")
            )

    n = plan.n
    u_size, v1_size, v2_size, _ = dec.sizes
    pair = dec.p_v1v2_given_u
    rng = np.random.default_rng(seed)
    clouds, spread = structure.clouds, structure.spread
    n1, n2 = structure.layer1.codewords, structure.layer2.codewords

    u_words = _draw(rng, dec.p_u.probs[None, :], np.zeros((clouds, spread, n), dtype=np.int64))
    base = u_words[:, :, None, :]
    v1_words = _draw(rng, pair.sum(axis=2), np.broadcast_to(base, (clouds, spread, n1, n)))
    v2_words = _draw(rng, pair.sum(axis=1), np.broadcast_to(base, (clouds, spread, n2, n)))

    dependence = conditional_mutual_information_array(
        pair * dec.p_u.probs[:, None, None], [1], [2], [0]
    )
    independent = dependence <= INDEPENDENCE_TOLERANCE
    selection = "independent" if independent else "max-joint"
    with np.errstate(divide="ignore"):
        log_pair = np.log(pair)

    columns: dict[tuple[int, int, int, int], int] = {}
    rows: list[int] = []
    cols: list[int] = []
    weights: list[float] = []
    layer1_sets = [even_mapping(w, structure.m11, structure.layer1) for w in range(structure.m11)]
    layer2_sets = [even_mapping(w, structure.m22, structure.layer2) for w in range(structure.m22)]

    for message in range(structure.messages):
        w0, w10, w20, w11, w22 = np.unravel_index(message, structure.message_shape)
        k = int(np.ravel_multi_index((w0, w10, w20), (structure.m0, structure.m10, structure.m20)))
        first, second = layer1_sets[int(w11)], layer2_sets[int(w22)]
        for r in range(spread):
            if independent:
                pairs = [(a, b) for a in first for b in second]
            else:
                scores = log_pair[
                    u_words[k, r][None, None, :],
                    v1_words[k, r, first][:, None, :],
                    v2_words[k, r, second][None, :, :],
                ].sum(axis=-1)
                a, b = np.unravel_index(int(np.argmax(scores)), scores.shape)
                pairs = [(first[int(a)], second[int(b)])]
            weight = 1.0 / (spread * len(pairs))
            for a, b in pairs:
                column = columns.setdefault((k, r, a, b), len(columns))
                rows.append(message)
                cols.append(column)
                weights.append(weight)

    if len(columns) > max_codewords:
        raise fail(BudgetExceeded("encoder transmissions", len(columns), max_codewords))
    keys = np.array(list(columns), dtype=np.int64).reshape(-1, 4)
    transmissions = (
        v1_words[keys[:, 0], keys[:, 1], keys[:, 2]] * v2_size
        + v2_words[keys[:, 0], keys[:, 1], keys[:, 3]]
    )
    encoder = sparse.csr_matrix(
        (weights, (rows, cols)), shape=(structure.messages, len(columns))
    )
    logger.info(
        f"Codebook n={n} seed={seed}: {structure.messages} messages, "
        f"{len(columns)} transmissions, pair selection {selection}"
    )
    return WiretapCodebook(
        plan=plan,
        structure=structure,
        seed=seed,
        u_words=u_words,
        v1_words=v1_words,
        v2_words=v2_words,
        encoder=encoder,
        transmissions=transmissions,
        columns=keys,
        x_given_pair=dec.p_x_given_v1v2.reshape(v1_size * v2_size, -1),
        pair_selection=selection,
        metadata={"u_size": u_size, "valid": plan.valid},
    )


# =============================================================================
# Exact enumeration
# =============================================================================


@dataclass(frozen=True, slots=True)
class EquivocationReport:
    """Conditional entropies (bits) given the eavesdropper's Z^n, and per-use rates."""

    h_w1: float
    h_w2: float
    h_w12: float
    h_all: float
    h_w2_given_w1: float
    re1: float
    re2: float
    re12: float
    max_posterior_error: float
    enumerated: int


@dataclass(frozen=True, slots=True)
class ErrorReport:
    """Exact MAP error per receiver; ``pe`` is the union bound min(1, pe1 + pe2)."""

    pe1: float
    pe2: float
    pe: float
    pe_lower: float
    enumerated: int


@dataclass(frozen=True, slots=True)
class ExactSecrecyReport:
    n: int
    seed: int
    realized: tuple[float, float, float]
    message_entropy: float
    equivocation: EquivocationReport
    error: ErrorReport
    valid: bool

    @property
    def gap(self) -> float:
        """(H(W1, W2) - H(W1, W2 | Z^n)) / n."""
        return self.message_entropy / self.n - self.equivocation.re12


def _prior(code: WiretapCodebook, message_prior: ArrayLike | None) -> FloatArray:
    count = code.structure.messages
    if message_prior is None:
        return np.full(count, 1.0 / count)
    prior = Pmf(np.asarray(message_prior, dtype=np.float64))
    if prior.size != count:
        raise fail(DimensionMismatch("message prior", count, prior.size))
    return prior.probs


def _check_enumeration(n: int, channel: DiscreteChannel, max_output_bits: float) -> int:
    bits = n * math.log2(channel.output_size)
    if bits > max_output_bits:
        raise fail(BudgetExceeded("output sequences (bits)", bits, max_output_bits))
    return channel.output_size**n


def _chunks(total: int, width: int) -> list[tuple[int, int]]:
    return [(start, min(total, start + width)) for start in range(0, total, width)]


def _joint_chunk(
    code: WiretapCodebook,
    weighted: sparse.csr_matrix,
    kernel: FloatArray,
    start: int,
    stop: int,
) -> FloatArray:
    """P(w, out^n) for the output sequences with flat index in [start, stop)."""
    outputs = np.unravel_index(np.arange(start, stop), (kernel.shape[1],) * code.n)
    likelihood = np.ones((code.transmissions.shape[0], stop - start))
    for i, column in enumerate(outputs):
        likelihood *= kernel[code.transmissions[:, i]][:, column]
    return np.asarray(weighted @ likelihood)


def _neg_plogp(p: FloatArray) -> float:
    positive = p[p > 0]
    return float(-np.sum(positive * np.log2(positive)))


def _map_reduce(
    work: Callable[[tuple[int, int]], tuple[float, ...]],
    chunks: Sequence[tuple[int, int]],
    workers: int,
) -> list[tuple[float, ...]]:
    if workers <= 1 or len(chunks) <= 1:
        return [work(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, chunks))


def _chunk_width(code: WiretapCodebook) -> int:
    return max(1, CHUNK_ENTRIES // max(code.transmissions.shape[0], code.structure.messages))


def exact_equivocation(
    code: WiretapCodebook,
    bce: BceChannel,
    message_prior: ArrayLike | None = None,
    workers: int = 1,
    max_output_bits: float = MAX_OUTPUT_BITS,
) -> EquivocationReport:
    """H(W1|Z^n), H(W2|Z^n), H(W1,W2|Z^n) and more by summing over every z^n."""
    total = _check_enumeration(code.n, bce.z, max_output_bits)
    prior = _prior(code, message_prior)
    weighted = sparse.diags(prior) @ code.encoder
    kernel = code.effective_kernel(bce.z)
    m0, m10, m20, m11, m22 = code.structure.message_shape

    def work(chunk: tuple[int, int]) -> tuple[float, ...]:
        joint = _joint_chunk(code, weighted, kernel, *chunk)
        width = joint.shape[1]
        pz = joint.sum(axis=0)
        shaped = joint.reshape(m0, m10, m20, m11, m22, width)
        w12 = shaped.sum(axis=0)
        w1 = w12.sum(axis=(1, 3))
        w2 = w12.sum(axis=(0, 2))
        w1_slice = w12.sum(axis=(1, 3), keepdims=True)
        ratio = np.divide(w12, w1_slice, out=np.zeros_like(w12), where=w12 > 0)
        positive = w12 > 0
        h_w2_given_w1 = float(-np.sum(w12[positive] * np.log2(ratio[positive])))
        seen = pz > 0
        normalized = joint[:, seen].sum(axis=0) / pz[seen]
        posterior_error = float(np.max(np.abs(normalized - 1.0), initial=0.0))
        return (
            _neg_plogp(w1),
            _neg_plogp(w2),
            _neg_plogp(w12),
            _neg_plogp(joint),
            h_w2_given_w1,
            _neg_plogp(pz),
            posterior_error,
        )

    parts = _map_reduce(work, _chunks(total, _chunk_width(code)), workers)
    h_z = math.fsum(p[5] for p in parts)

    def conditional(index: int) -> float:
        return max(0.0, math.fsum(p[index] for p in parts) - h_z)

    h_w1, h_w2, h_w12, h_all = (conditional(i) for i in range(4))
    n = code.n
    return EquivocationReport(
        h_w1=h_w1,
        h_w2=h_w2,
        h_w12=h_w12,
        h_all=h_all,
        h_w2_given_w1=max(0.0, math.fsum(p[4] for p in parts)),
        re1=h_w1 / n,
        re2=h_w2 / n,
        re12=h_w12 / n,
        max_posterior_error=max(p[6] for p in parts),
        enumerated=total,
    )


def _correct_probability(
    code: WiretapCodebook,
    weighted: sparse.csr_matrix,
    channel: DiscreteChannel,
    keep: tuple[int, ...],
    workers: int,
    max_output_bits: float,
) -> tuple[float, int]:
    """sum over y^n of max over the receiver's message of P(message, y^n)."""
    total = _check_enumeration(code.n, channel, max_output_bits)
    kernel = code.effective_kernel(channel)
    shape = code.structure.message_shape
    dropped = tuple(axis for axis in range(5) if axis not in keep)

    def work(chunk: tuple[int, int]) -> tuple[float, ...]:
        joint = _joint_chunk(code, weighted, kernel, *chunk)
        grouped = joint.reshape(*shape, joint.shape[1]).sum(axis=dropped)
        return (float(grouped.reshape(-1, joint.shape[1]).max(axis=0).sum()),)

    parts = _map_reduce(work, _chunks(total, _chunk_width(code)), workers)
    return math.fsum(p[0] for p in parts), total


def exact_error_probability(
    code: WiretapCodebook,
    bce: BceChannel,
    message_prior: ArrayLike | None = None,
    workers: int = 1,
    max_output_bits: float = MAX_OUTPUT_BITS,
) -> ErrorReport:
    """
    Exact MAP error at each receiver. Receiver 1 decodes (W0, W10, W11) and
    receiver 2 decodes (W0, W20, W22).
    """
    prior = _prior(code, message_prior)
    weighted = sparse.diags(prior) @ code.encoder
    pc1, total1 = _correct_probability(code, weighted, bce.y1, (0, 1, 3), workers, max_output_bits)
    pc2, total2 = _correct_probability(code, weighted, bce.y2, (0, 2, 4), workers, max_output_bits)
    pe1 = min(1.0, max(0.0, 1.0 - pc1))
    pe2 = min(1.0, max(0.0, 1.0 - pc2))
    return ErrorReport(
        pe1=pe1,
        pe2=pe2,
        pe=min(1.0, pe1 + pe2),
        pe_lower=max(pe1, pe2),
        enumerated=total1 + total2,
    )


def message_posteriors(
    code: WiretapCodebook,
    bce: BceChannel,
    message_prior: ArrayLike | None = None,
    max_output_bits: float = MAX_OUTPUT_BITS,
) -> Iterator[tuple[int, FloatArray]]:
    """(flat z^n index, P(w | z^n)) for every z^n of positive probability."""
    total = _check_enumeration(code.n, bce.z, max_output_bits)
    prior = _prior(code, message_prior)
    weighted = sparse.diags(prior) @ code.encoder
    kernel = code.effective_kernel(bce.z)
    for start, stop in _chunks(total, _chunk_width(code)):
        joint = _joint_chunk(code, weighted, kernel, start, stop)
        pz = joint.sum(axis=0)
        for offset in np.nonzero(pz > 0)[0]:
            yield start + int(offset), joint[:, offset] / pz[offset]


def simulate(
    code: WiretapCodebook,
    bce: BceChannel,
    message_prior: ArrayLike | None = None,
    workers: int = 1,
    max_output_bits: float = MAX_OUTPUT_BITS,
) -> ExactSecrecyReport:
    """Equivocation and error probability of one codebook."""
    equivocation = exact_equivocation(code, bce, message_prior, workers, max_output_bits)
    if equivocation.max_posterior_error > 1e-12:
        raise fail(
            NumericalError("posterior normalization", equivocation.max_posterior_error, 1e-12)
        )
    error = exact_error_probability(code, bce, message_prior, workers, max_output_bits)
    prior = _prior(code, message_prior)
    shaped = prior.reshape(code.structure.message_shape)
    return ExactSecrecyReport(
        n=code.n,
        seed=code.seed,
        realized=code.structure.realized_rates(code.n),
        message_entropy=_neg_plogp(shaped.sum(axis=0)),
        equivocation=equivocation,
        error=error,
        valid=code.plan.valid,
    )


# =============================================================================
# Trends
# =============================================================================


@dataclass(frozen=True, slots=True)
class TrendRow:
    n: int
    mean_gap: float
    mean_pe: float
    seeds: int


def secrecy_trend(
    bce: BceChannel,
    dists: Decomposition,
    n_list: Sequence[int],
    seeds: Sequence[int],
    targets: RateTargets,
    workers: int = 1,
    max_output_bits: float = MAX_OUTPUT_BITS,
    max_codewords: int = MAX_CODEWORDS,
) -> list[TrendRow]:
    """Per block length, seed averages of the secrecy gap and of Pe."""
    if not seeds:
        raise fail(ValidationError(field="seeds", message="need at least one seed"))
    rows = []
    for n in n_list:
        plan = plan_binning(bce, dists, n, targets)
        reports = [
            simulate(
                generate_codebook(plan, dists, seed, max_codewords),
                bce,
                workers=workers,
                max_output_bits=max_output_bits,
            )
            for seed in seeds
        ]
        row = TrendRow(
            n=n,
            mean_gap=math.fsum(r.gap for r in reports) / len(reports),
            mean_pe=math.fsum(r.error.pe for r in reports) / len(reports),
            seeds=len(reports),
        )
        logger.info(f"n={n}: mean gap {row.mean_gap:.6g} bits/use, mean Pe {row.mean_pe:.6g}")
        rows.append(row)
    return rows
