"""Factor-graph calibration of topic probabilities.

Each constrained topic becomes a binary variable with a unary factor built
from its (clamped) input probability: f(0) = 1 - p, f(1) = p.  Each
constraint contributes a pairwise factor with a fixed 2x2 potential.  The
calibrated probability of a topic is its marginal in the resulting joint
distribution, computed exactly (enumeration) for small connected components
and by loopy sum-product belief propagation for larger ones.  Topics that
appear in no constraint pass through bit-identical.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .constraints import ConstraintSet
from .errors import DataError, NumericError

__all__ = [
    "BPConfig",
    "BPResult",
    "FactorGraph",
    "NonConvergenceWarning",
    "BRUTE_FORCE_COMPONENT_LIMIT",
    "build_factor_graph",
    "variable_to_factor_message",
    "factor_to_variable_message",
    "run_belief_propagation",
    "brute_force_marginals",
    "connected_components",
    "calibrate",
]

#: Hard cap on exact enumeration, chosen so 2**k state sweeps stay cheap.
BRUTE_FORCE_COMPONENT_LIMIT = 25

_ENUM_CHUNK = 1 << 16


class NonConvergenceWarning(RuntimeWarning):
    """Loopy belief propagation hit max_iters without converging."""


@dataclass(frozen=True)
class BPConfig:
    """Knobs for message passing and the exact/approximate split.

    ``epsilon`` clamps input probabilities into [eps, 1-eps] so that hard
    0/1 inputs cannot zero out an entire message product (the inclusion
    potential has a structural zero at parent=0, child=1).
    """

    max_iters: int = 100
    tolerance: float = 1e-8
    damping: float = 0.0
    epsilon: float = 1e-6
    exact_component_limit: int = 20

    def __post_init__(self):
        if self.max_iters < 1:
            raise DataError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tolerance > 0:
            raise DataError(f"tolerance must be > 0, got {self.tolerance}")
        if not 0.0 <= self.damping < 1.0:
            raise DataError(f"damping must be in [0, 1), got {self.damping}")
        if not 0.0 < self.epsilon < 0.5:
            raise DataError(f"epsilon must be in (0, 0.5), got {self.epsilon}")
        if self.exact_component_limit < 0:
            raise DataError(
                f"exact_component_limit must be >= 0, got {self.exact_component_limit}"
            )


@dataclass
class FactorGraph:
    """Binary variables, unary evidence, pairwise potentials, and messages.

    ``variables[i]`` is the topic index of variable position ``i``; all
    other fields are in position terms.  Edges are directed-pair slots:
    edge ``2*f + role`` connects factor ``f`` to its row (role 0) or column
    (role 1) variable, and holds one message in each direction
    (``msg_vf`` and ``msg_fv``).
    """

    variables: tuple[int, ...]
    unary: np.ndarray
    factor_vars: np.ndarray
    potentials: np.ndarray
    var_edges: tuple[tuple[int, ...], ...]
    passthrough: tuple[int, ...]
    msg_vf: np.ndarray = field(repr=False, default=None)
    msg_fv: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.msg_vf is None or self.msg_fv is None:
            self.reset_messages()

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_factors(self) -> int:
        return self.factor_vars.shape[0]

    @property
    def n_edges(self) -> int:
        return 2 * self.n_factors

    def reset_messages(self) -> None:
        """Set every message (both directions) to the uniform 2-vector."""
        self.msg_vf = np.full((self.n_edges, 2), 0.5)
        self.msg_fv = np.full((self.n_edges, 2), 0.5)


@dataclass(frozen=True)
class BPResult:
    """Marginals aligned with ``graph.variables``, plus schedule telemetry."""

    marginals: np.ndarray
    iterations: int
    converged: bool


def _check_probs(probs) -> np.ndarray:
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"probability vector must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError("probability vector contains non-finite entries")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DataError("probability vector has entries outside [0, 1]")
    return arr


def _check_indices(constraints: ConstraintSet, n_topics: int) -> None:
    top = constraints.max_index()
    if top >= n_topics:
        raise DataError(
            f"constraint references topic index {top}, "
            f"but only {n_topics} probabilities were given"
        )


def _normalized(vec: np.ndarray, what: str) -> np.ndarray:
    total = float(vec[0] + vec[1])
    if not np.isfinite(total) or total <= 0.0:
        raise NumericError(f"{what} is all-zero or non-finite; cannot normalize")
    return vec / total


def build_factor_graph(
    probs, constraints: ConstraintSet, config: BPConfig = BPConfig()
) -> FactorGraph:
    """Assemble the graph over constrained topics; messages start uniform."""
    arr = _check_probs(probs)
    _check_indices(constraints, arr.size)
    topics = sorted(constraints.constrained_topics())
    pos = {t: i for i, t in enumerate(topics)}

    clamped = np.clip(arr[topics] if topics else np.empty(0), config.epsilon, 1.0 - config.epsilon)
    unary = np.column_stack([1.0 - clamped, clamped]) if topics else np.empty((0, 2))

    triples = constraints.factors()
    factor_vars = np.zeros((len(triples), 2), dtype=np.int64)
    potentials = np.zeros((len(triples), 2, 2))
    edges: list[list[int]] = [[] for _ in topics]
    for f, (row_t, col_t, pot) in enumerate(triples):
        factor_vars[f, 0] = pos[row_t]
        factor_vars[f, 1] = pos[col_t]
        potentials[f] = pot
        edges[pos[row_t]].append(2 * f)
        edges[pos[col_t]].append(2 * f + 1)

    constrained = set(topics)
    passthrough = tuple(t for t in range(arr.size) if t not in constrained)
    return FactorGraph(
        variables=tuple(topics),
        unary=unary,
        factor_vars=factor_vars,
        potentials=potentials,
        var_edges=tuple(tuple(e) for e in edges),
        passthrough=passthrough,
    )


def variable_to_factor_message(v: int, f: int, graph: FactorGraph) -> np.ndarray:
    """Product of incoming messages at variable ``v`` except from factor ``f``.

    The unary factor is always part of the product; only the message from
    the excluded pairwise factor is left out.
    """
    out = graph.unary[v].copy()
    for e in graph.var_edges[v]:
        if e // 2 == f:
            continue
        out *= graph.msg_fv[e]
    return _normalized(out, f"message from variable {v} to factor {f}")


def factor_to_variable_message(f: int, v: int, graph: FactorGraph) -> np.ndarray:
    """Marginalize factor ``f``'s potential against the other side's message."""
    row_v, col_v = graph.factor_vars[f]
    pot = graph.potentials[f]
    if v == row_v:
        out = pot @ graph.msg_vf[2 * f + 1]
    elif v == col_v:
        out = pot.T @ graph.msg_vf[2 * f]
    else:
        raise DataError(f"variable {v} is not an endpoint of factor {f}")
    return _normalized(out, f"message from factor {f} to variable {v}")


def _belief(v: int, graph: FactorGraph) -> np.ndarray:
    out = graph.unary[v].copy()
    for e in graph.var_edges[v]:
        out *= graph.msg_fv[e]
    return _normalized(out, f"belief at variable {v}")


def run_belief_propagation(graph: FactorGraph, config: BPConfig = BPConfig()) -> BPResult:
    """Synchronous (flooding) sum-product until the L-inf message change
    drops below tolerance or ``max_iters`` is exhausted.

    One iteration recomputes every variable-to-factor message from the
    previous iteration's factor messages, then every factor-to-variable
    message from those fresh variable messages.  With damping ``d``, each
    stored message is ``(1-d)*computed + d*previous``.  Non-convergence is
    reported via the flag, never raised.
    """
    graph.reset_messages()
    n_edges = graph.n_edges
    if n_edges == 0:
        marginals = np.array([_belief(v, graph)[1] for v in range(graph.n_variables)])
        return BPResult(marginals=marginals, iterations=0, converged=True)

    d = config.damping
    endpoints = [
        (f, int(graph.factor_vars[f, role])) for f in range(graph.n_factors) for role in (0, 1)
    ]
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        old_vf = graph.msg_vf.copy()
        old_fv = graph.msg_fv.copy()
        for e, (f, v) in enumerate(endpoints):
            computed = variable_to_factor_message(v, f, graph)
            graph.msg_vf[e] = (1.0 - d) * computed + d * old_vf[e]
        for e, (f, v) in enumerate(endpoints):
            computed = factor_to_variable_message(f, v, graph)
            graph.msg_fv[e] = (1.0 - d) * computed + d * old_fv[e]
        delta = max(
            float(np.max(np.abs(graph.msg_vf - old_vf))),
            float(np.max(np.abs(graph.msg_fv - old_fv))),
        )
        if delta < config.tolerance:
            converged = True
            break

    marginals = np.array([_belief(v, graph)[1] for v in range(graph.n_variables)])
    return BPResult(marginals=marginals, iterations=iterations, converged=converged)


def connected_components(constraints: ConstraintSet) -> list[list[int]]:
    """Connected components of the constraint graph, as sorted topic lists.

    Components are ordered by their smallest topic index, so output is
    deterministic.
    """
    adjacency: dict[int, set[int]] = {}
    for a, b in list(constraints.inclusions) + list(constraints.exclusions):
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)
    seen: set[int] = set()
    components: list[list[int]] = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        stack = [start]
        component: list[int] = []
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            component.append(node)
            stack.extend(adjacency[node] - seen)
        components.append(sorted(component))
    return components


def _component_factors(
    constraints: ConstraintSet, members: set[int]
) -> list[tuple[int, int, np.ndarray]]:
    return [(r, c, pot) for r, c, pot in constraints.factors() if r in members]


def _enumerate_marginals(
    unary: np.ndarray, factors: list[tuple[int, int, np.ndarray]]
) -> np.ndarray:
    """Exact P(v=1) for every variable by summing over all 2**k states.

    States are swept in fixed-size chunks so k up to the brute-force limit
    stays within modest memory.
    """
    k = unary.shape[0]
    total_states = 1 << k
    z = 0.0
    ones_mass = np.zeros(k)
    for start in range(0, total_states, _ENUM_CHUNK):
        states = np.arange(start, min(start + _ENUM_CHUNK, total_states), dtype=np.int64)
        cols = [(states >> i) & 1 for i in range(k)]
        weights = np.ones(states.size)
        for i in range(k):
            weights *= unary[i][cols[i]]
        for row_i, col_i, pot in factors:
            weights *= pot[cols[row_i], cols[col_i]]
        z += float(weights.sum())
        for i in range(k):
            ones_mass[i] += float(weights @ cols[i])
    if not np.isfinite(z) or z <= 0.0:
        raise NumericError("partition function is zero or non-finite")
    return ones_mass / z


def _exact_component(
    probs: np.ndarray,
    members: list[int],
    factors: list[tuple[int, int, np.ndarray]],
    epsilon: float,
) -> np.ndarray:
    pos = {t: i for i, t in enumerate(members)}
    clamped = np.clip(probs[members], epsilon, 1.0 - epsilon)
    unary = np.column_stack([1.0 - clamped, clamped])
    local = [(pos[r], pos[c], pot) for r, c, pot in factors]
    return _enumerate_marginals(unary, local)


def brute_force_marginals(
    probs, constraints: ConstraintSet, epsilon: float = 1e-6
) -> np.ndarray:
    """Exact calibrated marginals by enumeration; the verification oracle.

    Every topic is treated as a variable: unconstrained topics come back as
    their clamped inputs, constrained topics as exact joint marginals.
    Components larger than BRUTE_FORCE_COMPONENT_LIMIT are rejected.
    """
    arr = _check_probs(probs)
    _check_indices(constraints, arr.size)
    if not 0.0 < epsilon < 0.5:
        raise DataError(f"epsilon must be in (0, 0.5), got {epsilon}")
    out = np.clip(arr, epsilon, 1.0 - epsilon)
    for members in connected_components(constraints):
        if len(members) > BRUTE_FORCE_COMPONENT_LIMIT:
            raise DataError(
                f"connected component with {len(members)} variables exceeds "
                f"the enumeration limit of {BRUTE_FORCE_COMPONENT_LIMIT}"
            )
        factors = _component_factors(constraints, set(members))
        out[members] = _exact_component(arr, members, factors, epsilon)
    return out


def calibrate(probs, constraints: ConstraintSet, config: BPConfig = BPConfig()) -> np.ndarray:
    """Constraint-calibrated probabilities (the pipeline's final vector).

    Per connected component: exact enumeration when the component has at
    most ``exact_component_limit`` variables, loopy BP otherwise.  Topics
    outside every constraint are returned bit-identical.  A component whose
    BP run fails to converge emits :class:`NonConvergenceWarning`.
    """
    arr = _check_probs(probs)
    _check_indices(constraints, arr.size)
    out = arr.copy()
    for members in connected_components(constraints):
        factors = _component_factors(constraints, set(members))
        if len(members) <= config.exact_component_limit:
            out[members] = _exact_component(arr, members, factors, config.epsilon)
            continue
        pos = {t: i for i, t in enumerate(members)}
        clamped = np.clip(arr[members], config.epsilon, 1.0 - config.epsilon)
        unary = np.column_stack([1.0 - clamped, clamped])
        factor_vars = np.array([[pos[r], pos[c]] for r, c, _ in factors], dtype=np.int64)
        potentials = np.stack([pot for _, _, pot in factors])
        edges: list[list[int]] = [[] for _ in members]
        for f in range(factor_vars.shape[0]):
            edges[factor_vars[f, 0]].append(2 * f)
            edges[factor_vars[f, 1]].append(2 * f + 1)
        graph = FactorGraph(
            variables=tuple(members),
            unary=unary,
            factor_vars=factor_vars,
            potentials=potentials,
            var_edges=tuple(tuple(e) for e in edges),
            passthrough=(),
        )
        result = run_belief_propagation(graph, config)
        if not result.converged:
            warnings.warn(
                f"belief propagation did not converge within {config.max_iters} "
                f"iterations on a component of {len(members)} variables",
                NonConvergenceWarning,
                stacklevel=2,
            )
        out[members] = result.marginals
    return out
