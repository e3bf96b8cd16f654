"""Synthetic synchronization problems under several corruption models.

All generators are pure functions of ``(config, seeded rng)``: the same seed
reproduces the same instance bit for bit.  Ground-truth absolute permutations
are Haar (uniform) samples; good edges carry exact relative permutations and
corrupted edges are drawn from the model-specific adversarial distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .blocks import BlockMeasurement, WeightedGraph
from .errors import GenerationError
from .perms import Permutation

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

MODELS = ("uniform", "superspreader", "lbc", "lac")
DX_SAMPLERS = ("haar", "lac", "mixture")

_CONNECTIVITY_ATTEMPTS = 1000


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer (public-domain constants)."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Mix a master seed with stream indices into a fresh 64-bit seed.

    ``derive_seed(s, a, b)`` folds each index into the state with a splitmix64
    round, so per-trial streams are reproducible and statistically unrelated.
    """
    state = master & _MASK64
    for idx in indices:
        state = splitmix64(state ^ ((idx + 1) * _GOLDEN & _MASK64))
    return state


@dataclass(frozen=True)
class SeededRng:
    """A named random stream: (seed, stream) fully determine the samples."""

    seed: int
    stream: int = 0

    @cached_property
    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(derive_seed(self.seed, self.stream)))

    def substream(self, *indices: int) -> "SeededRng":
        """A statistically independent child stream with its own state."""
        return SeededRng(derive_seed(self.seed, self.stream, *indices))


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of one synthetic corruption model.

    ``model`` selects the corruption mechanism; ``dx`` names the distribution
    of corrupted blocks for the superspreader model (``haar``, ``lac`` for
    3-column-cycle perturbations of the true block, or ``mixture`` which emits
    a fixed wrong permutation with probability ``mix_prob``).
    """

    model: str
    n: int
    m: int
    p: float = 1.0
    q: float | None = None  # uniform: corruption probability
    eps: float | None = None  # superspreader: fraction of surviving edges
    node: int = 0  # superspreader node
    dx: str = "haar"
    mix_prob: float | None = None
    n_c: int | None = None  # lbc/lac: number of corrupted nodes
    m_c: int | None = None  # lbc/lac: corrupted incident edges per node

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.n < 2 or self.m < 1:
            raise ValueError("need n >= 2 and m >= 1")
        if not 0 < self.p <= 1:
            raise ValueError("graph density p must lie in (0, 1]")
        if self.model == "uniform":
            if self.q is None or not 0 <= self.q <= 1:
                raise ValueError("uniform model needs q in [0, 1]")
        elif self.model == "superspreader":
            if self.eps is None or not 0 < self.eps <= 1:
                raise ValueError("superspreader model needs eps in (0, 1]")
            if not 0 <= self.node < self.n:
                raise ValueError("superspreader node out of range")
            if self.dx not in DX_SAMPLERS:
                raise ValueError(f"unknown corrupted-block sampler {self.dx!r}")
            if self.dx == "lac" and self.m < 3:
                raise ValueError("3-column corruption needs m >= 3")
            if self.dx == "mixture" and (self.mix_prob is None or not 0 <= self.mix_prob <= 1):
                raise ValueError("mixture sampler needs mix_prob in [0, 1]")
        else:  # lbc / lac
            if self.n_c is None or not 0 <= self.n_c <= self.n:
                raise ValueError("need 0 <= n_c <= n")
            if self.m_c is None or not 0 <= self.m_c <= self.n - 1:
                raise ValueError("need 0 <= m_c <= n - 1")
            if self.model == "lac" and self.m < 3:
                raise ValueError("3-column corruption needs m >= 3")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A measurement graph, optionally with ground truth and its bad edges."""

    graph: WeightedGraph
    meas: BlockMeasurement
    truth: tuple[Permutation, ...] | None = None
    bad_edges: frozenset[tuple[int, int]] | None = None
    # For the mixture sampler: the wrong permutation the corruption targets.
    # Diagnostic only; not part of the serialised value.
    corrupt_target: Permutation | None = field(default=None, compare=False)

    def __eq__(self, other: object) -> bool:
        """Value equality on the serialised content (diagnostics excluded)."""
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (self.graph == other.graph and self.meas == other.meas
                and self.truth == other.truth and self.bad_edges == other.bad_edges)

    __hash__ = None

    def __post_init__(self) -> None:
        if self.graph.n != self.meas.n:
            raise ValueError("graph and measurement disagree on node count")
        if not np.array_equal(self.graph.edges, self.meas.edges):
            raise ValueError("graph and measurement must share the same edge set")
        if self.truth is not None:
            if len(self.truth) != self.meas.n:
                raise ValueError("need one ground-truth permutation per node")
            if self.bad_edges is None:
                raise ValueError("ground truth must come with its bad-edge set")
        if self.bad_edges is not None:
            bad = frozenset((min(i, j), max(i, j)) for i, j in self.bad_edges)
            object.__setattr__(self, "bad_edges", bad)
            idx = self.meas.edge_index
            for e in bad:
                if e not in idx:
                    raise ValueError(f"bad edge {e} is not in the edge set")
        if self.truth is not None:
            good = ~self.bad_mask
            expected = relative_maps(self.truth_maps, self.meas.edges[good])
            if not np.array_equal(self.meas.maps[good], expected):
                raise ValueError("a good edge disagrees with the ground truth")

    @property
    def n(self) -> int:
        return self.meas.n

    @property
    def m(self) -> int:
        return self.meas.m

    @cached_property
    def truth_maps(self) -> np.ndarray:
        if self.truth is None:
            raise ValueError("instance has no ground truth")
        return np.stack([p.map for p in self.truth])

    @cached_property
    def bad_mask(self) -> np.ndarray:
        """Boolean mask over ``meas.edges`` marking bad edges."""
        if self.bad_edges is None:
            raise ValueError("instance has no bad-edge set")
        idx = self.meas.edge_index
        mask = np.zeros(self.meas.num_edges, dtype=bool)
        for e in self.bad_edges:
            mask[idx[e]] = True
        return mask

    def truth_block(self, i: int, j: int) -> Permutation:
        maps = self.truth_maps
        inv_j = np.argsort(maps[j])
        return Permutation(inv_j[maps[i]])


def relative_maps(truth_maps: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Map arrays of ``P_i P_j^T`` for each edge ``(i, j)``, vectorised."""
    if len(edges) == 0:
        return np.zeros((0, truth_maps.shape[1]), dtype=np.int64)
    inv = np.argsort(truth_maps, axis=1)
    return np.take_along_axis(inv[edges[:, 1]], truth_maps[edges[:, 0]], axis=1)


def sample_haar_permutation(rng: SeededRng | np.random.Generator, m: int) -> Permutation:
    """A uniform (Haar) sample from the m! permutations, via Fisher-Yates."""
    if m < 1:
        raise ValueError("m must be positive")
    gen = rng.generator if isinstance(rng, SeededRng) else rng
    return Permutation(gen.permutation(m))


def _haar_maps(gen: np.random.Generator, count: int, m: int) -> np.ndarray:
    """``count`` independent Haar map arrays (vectorised Fisher-Yates)."""
    if count == 0:
        return np.zeros((0, m), dtype=np.int64)
    base = np.tile(np.arange(m, dtype=np.int64), (count, 1))
    return gen.permuted(base, axis=1)


def _three_column_cycle(gen: np.random.Generator, m: int) -> np.ndarray:
    """Identity with three uniformly chosen columns cyclically displaced.

    One of the two 3-cycles on the chosen columns, picked uniformly; never the
    identity or a transposition, so exactly three rows move.
    """
    a, b, c = np.sort(gen.choice(m, size=3, replace=False))
    qmap = np.arange(m, dtype=np.int64)
    if gen.integers(2) == 0:
        qmap[[a, b, c]] = [b, c, a]
    else:
        qmap[[a, b, c]] = [c, a, b]
    return qmap


def generate_er_graph(rng: SeededRng | np.random.Generator, n: int, p: float,
                      require_connected: bool = True) -> WeightedGraph:
    """Erdos-Renyi graph G(n, p) with unit weights.

    With ``require_connected`` the whole graph is resampled until connected,
    up to a fixed attempt cap.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    gen = rng.generator if isinstance(rng, SeededRng) else rng
    iu, ju = np.triu_indices(n, k=1)
    all_pairs = np.stack([iu, ju], axis=1).astype(np.int64)
    for _ in range(_CONNECTIVITY_ATTEMPTS):
        if p >= 1.0:
            edges = all_pairs
        else:
            edges = all_pairs[gen.random(len(all_pairs)) < p]
        graph = WeightedGraph.unit(n, edges)
        if not require_connected or graph.is_connected():
            return graph
    raise GenerationError(f"no connected G({n}, {p}) after {_CONNECTIVITY_ATTEMPTS} attempts")


def _store_canonical(src: int, dst: int, oriented_map: np.ndarray) -> np.ndarray:
    """Canonical (min, max) block map from a block oriented src -> dst."""
    return oriented_map if src < dst else np.argsort(oriented_map)


def generate_uniform(cfg: ModelConfig, rng: SeededRng) -> ProblemInstance:
    """Every edge is corrupted independently with probability q, by a Haar block."""
    if cfg.model != "uniform":
        raise ValueError("config is not for the uniform model")
    gen = rng.generator
    graph = generate_er_graph(gen, cfg.n, cfg.p)
    truth_maps = _haar_maps(gen, cfg.n, cfg.m)
    meas_maps = relative_maps(truth_maps, graph.edges)
    bad = gen.random(len(graph.edges)) < cfg.q
    nb = int(bad.sum())
    if nb:
        meas_maps = meas_maps.copy()
        meas_maps[bad] = _haar_maps(gen, nb, cfg.m)
    return _assemble(graph, cfg.m, meas_maps, truth_maps, graph.edges[bad])


def generate_superspreader(cfg: ModelConfig, rng: SeededRng) -> ProblemInstance:
    """All corruption is incident to one node; each of its edges survives w.p. eps."""
    if cfg.model != "superspreader":
        raise ValueError("config is not for the superspreader model")
    gen = rng.generator
    graph = generate_er_graph(gen, cfg.n, cfg.p)
    truth_maps = _haar_maps(gen, cfg.n, cfg.m)
    meas_maps = relative_maps(truth_maps, graph.edges).copy()
    i0 = cfg.node
    ei, ej = graph.edges[:, 0], graph.edges[:, 1]
    incident = np.flatnonzero((ei == i0) | (ej == i0))
    if incident.size == 0:
        raise GenerationError(f"superspreader node {i0} is isolated")
    bad_idx = incident[gen.random(incident.size) < 1.0 - cfg.eps]

    inv_truth = np.argsort(truth_maps, axis=1)
    corrupt_target = None
    if cfg.dx == "mixture":
        while True:
            crpt = gen.permutation(cfg.m)
            if not np.array_equal(crpt, truth_maps[i0]):
                break
        corrupt_target = Permutation(crpt)
        use_target = gen.random(bad_idx.size) < cfg.mix_prob
        haar_pool = iter(_haar_maps(gen, int((~use_target).sum()), cfg.m))
        for k, e in enumerate(bad_idx):
            a, b = int(ei[e]), int(ej[e])
            j = b if a == i0 else a
            if use_target[k]:
                drawn = inv_truth[j][crpt]  # P_crpt P_j^T
            else:
                drawn = next(haar_pool)
            meas_maps[e] = _store_canonical(i0, j, drawn)
    elif cfg.dx == "lac":
        for e in bad_idx:
            a, b = int(ei[e]), int(ej[e])
            j = b if a == i0 else a
            qmap = _three_column_cycle(gen, cfg.m)
            xstar = meas_maps[e] if a == i0 else np.argsort(meas_maps[e])
            drawn = xstar[qmap]  # Q * X_ij: three rows of the true block move
            meas_maps[e] = _store_canonical(i0, j, drawn)
    else:  # haar
        draws = _haar_maps(gen, bad_idx.size, cfg.m)
        for k, e in enumerate(bad_idx):
            a, b = int(ei[e]), int(ej[e])
            j = b if a == i0 else a
            meas_maps[e] = _store_canonical(i0, j, draws[k])

    inst = _assemble(graph, cfg.m, meas_maps, truth_maps, graph.edges[bad_idx])
    if corrupt_target is not None:
        inst = replace(inst, corrupt_target=corrupt_target)
    return inst


def _select_corrupted(cfg: ModelConfig, gen: np.random.Generator,
                      graph: WeightedGraph) -> list[tuple[int, int]]:
    """Corrupted (edge index, corrupting node) pairs for the lbc/lac models.

    ``n_c`` nodes are drawn without replacement; each draws ``m_c`` distinct
    candidate partners among the other ``n - 1`` nodes, and the candidate
    pairs that are actual edges become corrupted.  On a complete graph this
    corrupts exactly ``m_c`` incident edges per node; on sparser graphs
    proportionally fewer (about ``m_c * p``), and nodes of any degree are
    admissible.  Overlaps corrupt an edge once, with the earliest-drawn node
    as its corruptor.  Returned sorted by edge index.
    """
    nodes = gen.choice(cfg.n, size=cfg.n_c, replace=False)
    idx = {(int(i), int(j)): e for e, (i, j) in enumerate(graph.edges)}
    corruptor: dict[int, int] = {}
    for v in map(int, nodes):
        cand = gen.choice(cfg.n - 1, size=cfg.m_c, replace=False)
        partners = cand + (cand >= v)  # skip v itself
        for u in map(int, partners):
            e = idx.get((min(u, v), max(u, v)))
            if e is not None:
                corruptor.setdefault(e, v)
    return sorted(corruptor.items())


def generate_lbc(cfg: ModelConfig, rng: SeededRng) -> ProblemInstance:
    """Local biased corruption: wrong-but-plausible blocks biased away from truth.

    Each corrupted edge draws a candidate block as a ratio of two wrong
    absolute permutations; the candidate is kept when it correlates with the
    true block in at most one row, otherwise the edge gets a plain Haar
    block.  The wrong pair is drawn per edge, so corrupted edges are biased
    away from the truth without conspiring across the graph.
    """
    if cfg.model != "lbc":
        raise ValueError("config is not for the lbc model")
    gen = rng.generator
    graph = generate_er_graph(gen, cfg.n, cfg.p)
    truth_maps = _haar_maps(gen, cfg.n, cfg.m)
    meas_maps = relative_maps(truth_maps, graph.edges).copy()
    bad = _select_corrupted(cfg, gen, graph)
    if bad:
        bad_e = np.array([e for e, _ in bad])
        wrong_i = _haar_maps(gen, len(bad_e), cfg.m)
        wrong_j = _haar_maps(gen, len(bad_e), cfg.m)
        cand = np.take_along_axis(np.argsort(wrong_j, axis=1), wrong_i, axis=1)
        agree = (cand == meas_maps[bad_e]).sum(axis=1)
        use_cand = agree <= 1
        haar_pool = iter(_haar_maps(gen, int((~use_cand).sum()), cfg.m))
        for k, e in enumerate(bad_e):
            meas_maps[e] = cand[k] if use_cand[k] else next(haar_pool)
    bad_edges = graph.edges[[e for e, _ in bad]] if bad else np.zeros((0, 2), dtype=np.int64)
    return _assemble(graph, cfg.m, meas_maps, truth_maps, bad_edges)


def generate_lac(cfg: ModelConfig, rng: SeededRng) -> ProblemInstance:
    """Local adversarial corruption: measured blocks concentrate on identity.

    For a corrupted node v and incident edge (v, u) the measurement is
    ``Q P_u^T`` where Q displaces exactly three columns of the identity, so
    the block "votes" for the identity as v's absolute permutation.
    """
    if cfg.model != "lac":
        raise ValueError("config is not for the lac model")
    gen = rng.generator
    graph = generate_er_graph(gen, cfg.n, cfg.p)
    truth_maps = _haar_maps(gen, cfg.n, cfg.m)
    inv_truth = np.argsort(truth_maps, axis=1)
    meas_maps = relative_maps(truth_maps, graph.edges).copy()
    bad = _select_corrupted(cfg, gen, graph)
    for e, v in bad:
        i, j = int(graph.edges[e, 0]), int(graph.edges[e, 1])
        u = j if v == i else i
        qmap = _three_column_cycle(gen, cfg.m)
        drawn = inv_truth[u][qmap]  # Q P_u^T, oriented v -> u
        meas_maps[e] = _store_canonical(v, u, drawn)
    bad_edges = graph.edges[[e for e, _ in bad]] if bad else np.zeros((0, 2), dtype=np.int64)
    return _assemble(graph, cfg.m, meas_maps, truth_maps, bad_edges)


_GENERATORS = {
    "uniform": generate_uniform,
    "superspreader": generate_superspreader,
    "lbc": generate_lbc,
    "lac": generate_lac,
}


def generate_instance(cfg: ModelConfig, rng: SeededRng) -> ProblemInstance:
    """Dispatch to the generator named by ``cfg.model``."""
    return _GENERATORS[cfg.model](cfg, rng)


def _assemble(graph: WeightedGraph, m: int, meas_maps: np.ndarray,
              truth_maps: np.ndarray, bad_edges: np.ndarray) -> ProblemInstance:
    meas = BlockMeasurement(graph.n, m, graph.edges, meas_maps)
    truth = tuple(Permutation(row) for row in truth_maps)
    bad = frozenset((int(i), int(j)) for i, j in bad_edges)
    return ProblemInstance(graph, meas, truth, bad)


def well_posedness_filter(inst: ProblemInstance,
                          bad_edges: frozenset[tuple[int, int]] | None = None,
                          ) -> tuple[ProblemInstance, np.ndarray]:
    """Drop nodes all of whose incident edges are bad.

    Such nodes carry no usable information.  Returns the induced subproblem
    and the node remapping (old index -> new index, -1 for dropped nodes).
    Raises if the filtered problem is empty or disconnected.
    """
    bad = bad_edges if bad_edges is not None else inst.bad_edges
    if bad is None:
        raise ValueError("need a bad-edge set (from truth or caller-supplied)")
    bad = frozenset((min(i, j), max(i, j)) for i, j in bad)
    n = inst.n
    has_good = np.zeros(n, dtype=bool)
    for i, j in map(tuple, inst.meas.edges):
        if (i, j) not in bad:
            has_good[i] = has_good[j] = True
    keep = np.flatnonzero(has_good)
    if keep.size == 0:
        raise GenerationError("every node is fully corrupted; nothing remains")
    node_map = np.full(n, -1, dtype=np.int64)
    node_map[keep] = np.arange(keep.size)

    kept_rows = np.flatnonzero(has_good[inst.meas.edges[:, 0]] & has_good[inst.meas.edges[:, 1]])
    new_edges = node_map[inst.meas.edges[kept_rows]]
    new_graph = WeightedGraph(keep.size, new_edges, inst.graph.weights[kept_rows])
    if not new_graph.is_connected():
        raise GenerationError("filtered measurement graph is disconnected")
    new_meas = BlockMeasurement(keep.size, inst.m, new_edges, inst.meas.maps[kept_rows])
    new_truth = tuple(inst.truth[int(v)] for v in keep) if inst.truth is not None else None
    # The carried-over bad set is the instance's own when truth is present;
    # a caller-supplied estimate only drives which nodes get dropped.
    carried = inst.bad_edges if inst.truth is not None else (bad if bad_edges is not None else None)
    new_bad = None
    if carried is not None:
        new_bad = frozenset((int(node_map[i]), int(node_map[j])) for i, j in carried
                            if has_good[i] and has_good[j])
    filtered = ProblemInstance(new_graph, new_meas, new_truth, new_bad,
                               corrupt_target=inst.corrupt_target)
    return filtered, node_map
