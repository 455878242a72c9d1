"""Monodromy search for all decompositions of one target form.

Starting from a single known solution of the coefficient-matching
system at base parameters p0, each loop picks two fresh random complex
parameter tuples q1, q2 and tracks every known solution along the
triangle p0 -> q1 -> q2 -> p0.  Permuted sheets of the solution variety
come back as new solutions; the loop runs until no loop has produced
anything new for a while, a requested count is reached, or a loop
budget is exhausted.

Leaving a real base point, the first leg twists the start parameters by
a random unit-modulus gamma.  The system is jointly linear in the
weights and the parameters, so scaling every lambda by gamma turns a
known solution at p0 into an exact solution at gamma * p0, and the
segment gamma*p0 -> q1 stays clear of the real discriminant.
"""

import cmath
from dataclasses import dataclass, field

import numpy as np

from .homotopy import SegmentHomotopy, TrackSettings, _newton, track
from .waring import Decomposition


def _summand_distance(a, b, n: int) -> float:
    # Coordinate-wise, normalized by coordinate size: Newton-polished
    # endpoints of one and the same solution scatter proportionally to
    # their magnitude (times the Jacobian's condition number), so an
    # absolute metric would split large-weight duplicates.
    def coord(u, v):
        u, v = complex(u), complex(v)
        return abs(u - v) / (1.0 + max(abs(u), abs(v)))

    d = coord(a.lam, b.lam)
    for h in range(n):
        d = max(d, coord(a.l[h], b.l[h]))
    return d


def _has_perfect_matching(allowed: np.ndarray) -> bool:
    """Bipartite perfect matching on a boolean r x r adjacency matrix."""
    r = allowed.shape[0]
    match_of_col = [-1] * r

    def try_assign(row, seen):
        for col in range(r):
            if allowed[row, col] and not seen[col]:
                seen[col] = True
                if match_of_col[col] == -1 or try_assign(match_of_col[col], seen):
                    match_of_col[col] = row
                    return True
        return False

    for row in range(r):
        if not try_assign(row, [False] * r):
            return False
    return True


def canonical_distance(a: Decomposition, b: Decomposition) -> float:
    """Distance between decompositions modulo summand order.

    Minimum over summand pairings of the largest coordinate-wise
    distance between paired summands, computed as a bottleneck
    assignment: binary search over candidate thresholds with an
    augmenting-path matching on the r x r distance matrix.
    """
    if a.r != b.r or a.n != b.n:
        raise ValueError("decompositions have different shapes")
    r, n = a.r, a.n
    dist = np.empty((r, r))
    for i, si in enumerate(a.summands):
        for j, sj in enumerate(b.summands):
            dist[i, j] = _summand_distance(si, sj, n)
    values = np.unique(dist)
    lo, hi = 0, values.size - 1
    if _has_perfect_matching(dist <= values[0]):
        return float(values[0])
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(dist <= values[mid]):
            hi = mid
        else:
            lo = mid
    return float(values[hi])


@dataclass
class StopPolicy:
    """When to stop looping: whichever condition is met first."""

    stable_loops: int = 8
    target_count: int | None = None
    max_loops: int = 200

    def __post_init__(self):
        if self.stable_loops < 1 or self.max_loops < 1:
            raise ValueError("stable_loops and max_loops must be positive")
        if self.target_count is not None and self.target_count < 1:
            raise ValueError("target_count must be positive")


@dataclass
class LoopSpec:
    """One triangle: two auxiliary parameter tuples and the exit twist."""

    base_params: np.ndarray
    aux_params: tuple
    gamma_out: complex


def draw_loop(base_params, rng: np.random.Generator, twist_exit: bool, sampler=None) -> LoopSpec:
    """Sample the random data of one loop.

    With no sampler, the auxiliary instances match the base
    coefficients' magnitude coordinate by coordinate (with a small
    floor so vanishing entries still move).  Keeping every coefficient
    row at its natural scale keeps the solution path's velocity
    bounded; a uniform draw at the overall rms scale makes rows whose
    coefficients are many orders smaller than the largest ones move
    violently and stalls the tracker.

    A sampler(rng) callable overrides the default draw; it must return
    a parameter tuple drawn from a continuous distribution so the loop
    vertices stay generic.
    """
    base = np.asarray(base_params, dtype=np.complex128)
    if sampler is not None:
        aux = [np.asarray(sampler(rng), dtype=np.complex128) for _ in range(2)]
    else:
        rms = float(np.sqrt(np.mean(np.abs(base) ** 2))) if base.size else 1.0
        floor = 1e-3 * max(1.0, rms)
        scale = np.maximum(np.abs(base), floor)
        aux = []
        for _ in range(2):
            re = rng.standard_normal(base.size)
            im = rng.standard_normal(base.size)
            aux.append(scale * (re + 1j * im) / np.sqrt(2.0))
    gamma = cmath.exp(2j * cmath.pi * rng.random()) if twist_exit else 1.0 + 0j
    return LoopSpec(base, tuple(aux), gamma)


class SolutionRegistry:
    """Deduplicated solutions of one coefficient-matching system.

    Every stored decomposition is Newton-polished against the base
    parameters, satisfies the system to ``residual_tol`` (scaled), has
    no weight of modulus below ``lambda_tol``, and sits farther than
    ``dedup_tol`` from every other entry in canonical distance.
    """

    def __init__(
        self,
        system,
        base_params,
        n: int,
        dedup_tol: float = 1e-6,
        residual_tol: float = 1e-10,
        lambda_tol: float = 1e-10,
    ):
        self.system = system
        self.base_params = np.asarray(base_params, dtype=np.complex128)
        self.n = int(n)
        self.dedup_tol = dedup_tol
        self.residual_tol = residual_tol
        self.lambda_tol = lambda_tol
        self.solutions: list = []
        self.history: list = []
        self.warning: str | None = None

    def insert(self, candidate) -> bool:
        """Polish, validate and store a candidate; False on duplicate or reject."""
        if isinstance(candidate, Decomposition):
            vec = candidate.to_vector()
        else:
            vec = np.asarray(candidate, dtype=np.complex128)
        vec, res = _newton(self.system, self.base_params, vec, 5e-14, 25)
        if res >= self.residual_tol:
            return False
        dec = Decomposition.from_vector(vec, self.n)
        if any(abs(s.lam) < self.lambda_tol for s in dec.summands):
            return False
        for stored in self.solutions:
            if canonical_distance(dec, stored) < self.dedup_tol:
                return False
        self.solutions.append(dec)
        return True

    def __len__(self) -> int:
        return len(self.solutions)

    def serialize(self, d: int | None = None) -> dict:
        def pair(z):
            z = complex(z)
            return [z.real, z.imag]

        sols = []
        for dec in self.solutions:
            sols.append(
                {
                    "summands": [
                        {"l": [pair(v) for v in s.l], "lambda": pair(s.lam)}
                        for s in dec.summands
                    ]
                }
            )
        r = self.solutions[0].r if self.solutions else None
        return {
            "r": r,
            "n": self.n,
            "d": d,
            "solutions": sols,
            "history": [{"loop": i, "new": k} for i, k in self.history],
        }


def _scale_lambdas(vec: np.ndarray, n: int, factor: complex) -> np.ndarray:
    out = vec.copy()
    out[n :: n + 1] *= factor
    return out


def triangle_loop(
    registry: SolutionRegistry,
    loop: LoopSpec,
    settings: TrackSettings | None = None,
    pmap=map,
) -> int:
    """Carry every stored solution around one triangle; returns how many
    endpoints were new."""
    st = settings or TrackSettings()
    sys_ = registry.system
    p0 = registry.base_params
    q1, q2 = loop.aux_params
    gamma = loop.gamma_out
    leg0 = SegmentHomotopy(sys_, p0, q1, gamma=gamma)
    leg1 = SegmentHomotopy(sys_, q1, q2)
    leg2 = SegmentHomotopy(sys_, q2, p0)

    def transport(vec):
        x = _scale_lambdas(vec, registry.n, gamma)
        for leg in (leg0, leg1, leg2):
            result = track(leg, x, st)
            if not result.success:
                return None
            x = result.endpoint
        return x

    starts = [dec.to_vector() for dec in registry.solutions]
    new = 0
    for endpoint in pmap(transport, starts):
        if endpoint is not None and registry.insert(endpoint):
            new += 1
    return new


def solve(
    system,
    base_params,
    start: Decomposition,
    policy: StopPolicy | None = None,
    settings: TrackSettings | None = None,
    seed: int = 0,
    pmap=map,
    sampler=None,
) -> SolutionRegistry:
    """Monodromy enumeration of the solutions through one start point.

    Args:
        system: coefficient-matching PolySystem.
        base_params: parameters of the target form.
        start: known decomposition at the base parameters.
        policy: stop conditions (defaults: 8 fruitless loops, cap 200).
        settings: path-tracking settings.
        seed: randomness for the loop instances.
        pmap: map-like callable used to transport solutions; results
            are consumed in input order, so the registry's content does
            not depend on the executor.
        sampler: optional sampler(rng) for the auxiliary parameter
            tuples; used when generic coefficient draws would put the
            loop vertices' solutions at untrackable coordinates.

    Returns:
        SolutionRegistry; its ``warning`` field is set when the loop
        budget ran out before the count stabilized.
    """
    policy = policy or StopPolicy()
    st = settings or TrackSettings()
    base = np.asarray(base_params, dtype=np.complex128)
    registry = SolutionRegistry(system, base, n=start.n)
    if not registry.insert(start):
        raise ValueError("start decomposition does not solve the base system")

    scale = float(np.max(np.abs(base))) if base.size else 1.0
    real_base = float(np.max(np.abs(base.imag))) <= 1e-12 * (1.0 + scale)
    rng = np.random.default_rng(seed)

    fruitless = 0
    for loop_index in range(policy.max_loops):
        if policy.target_count is not None and len(registry) >= policy.target_count:
            return registry
        if fruitless >= policy.stable_loops:
            return registry
        loop = draw_loop(base, rng, twist_exit=real_base, sampler=sampler)
        new = triangle_loop(registry, loop, st, pmap=pmap)
        registry.history.append((loop_index, new))
        fruitless = fruitless + 1 if new == 0 else 0

    if policy.target_count is not None and len(registry) >= policy.target_count:
        return registry
    if fruitless < policy.stable_loops:
        registry.warning = (
            f"loop budget {policy.max_loops} exhausted before {policy.stable_loops} "
            f"consecutive fruitless loops"
        )
    return registry
