"""Local hidden-variable correlations.

A hidden-variable model bundles a space of hidden values ``lam`` carrying a
probability measure and two local outcome functions, ``A(a, lam)`` and
``B(b, lam)``. Its correlation is the average of ``A * B`` over the measure,
estimated by seeded Monte Carlo or by quadrature.

Outcome functions are vectorized: they take a :class:`~bellexp.spin.Direction`
and an ``(n, k)`` array of hidden values and return ``n`` outcomes in
``[-1, 1]``. Each one only ever sees its own setting.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import Callable, Literal

import numpy as np

from .quantum import qm_marginal
from .spaces import DiscreteSpace, SphereSpace, chunk_bounds, chunk_generator
from .spin import (
    DOWN,
    IDENTITY2,
    UP,
    X,
    Y,
    Z,
    Direction,
    TwoQubitState,
    pauli_dot,
    product_state,
    singlet,
    tensor,
)

Outcome = Callable[[Direction, np.ndarray], np.ndarray]
Method = Literal["monte-carlo", "sphere-quadrature"]

OUTCOME_ATOL = 1e-12
QUADRATURE_ROWS = 64  # quadrature points are evaluated in blocks of this many theta rows


@dataclass(frozen=True)
class IntegrationConfig:
    method: Method = "monte-carlo"
    sample_count: int = 100_000
    seed: int = 0
    confidence_sigma: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if self.method not in ("monte-carlo", "sphere-quadrature"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.method == "sphere-quadrature" and self.sample_count < 8:
            raise ValueError("sphere-quadrature needs sample_count (nodes per dimension) >= 8")
        if not self.confidence_sigma > 0:
            raise ValueError("confidence_sigma must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    std_error: float
    sample_count: int
    method: str

    def __float__(self):
        return self.mean


@dataclass(frozen=True)
class HiddenVariableModel:
    name: str
    space: SphereSpace | DiscreteSpace
    outcome_A: Outcome
    outcome_B: Outcome

    def sample_lambda(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.space.sample(rng, n)

    def products(self, a: Direction, b: Direction, lam: np.ndarray) -> np.ndarray:
        """``A(a, lam) * B(b, lam)`` with range checking."""
        out_a = np.asarray(self.outcome_A(a, lam), dtype=float)
        out_b = np.asarray(self.outcome_B(b, lam), dtype=float)
        for side, vals in (("A", out_a), ("B", out_b)):
            bad = np.flatnonzero(~(np.abs(vals) <= 1.0 + OUTCOME_ATOL))
            if bad.size:
                i = bad[0]
                raise ValueError(
                    f"model {self.name!r}: outcome_{side} = {vals[i]!r} outside [-1, 1] "
                    f"at lambda = {lam[i].tolist()}"
                )
        return out_a * out_b


def _mc_chunk(model, a, b, seed, k, start, stop):
    lam = model.sample_lambda(chunk_generator(seed, k), stop - start)
    prod = model.products(a, b, lam)
    return float(np.sum(prod)), float(np.sum(prod * prod))


def _run_chunks(fn, tasks, workers):
    if workers == 1 or len(tasks) == 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def lhv_correlation(
    model: HiddenVariableModel, a: Direction, b: Direction, cfg: IntegrationConfig
) -> CorrelationEstimate:
    """Average of ``A(a, lam) B(b, lam)`` over the model's hidden-variable measure.

    Monte Carlo results depend only on ``(seed, sample_count)``: samples are
    drawn in fixed chunks from per-chunk streams, and chunk partial sums are
    added serially in chunk order whatever ``cfg.workers`` is.
    """
    if cfg.method == "sphere-quadrature":
        return _quadrature_correlation(model, a, b, cfg)

    n = cfg.sample_count
    tasks = [(model, a, b, cfg.seed, k, lo, hi) for k, lo, hi in chunk_bounds(n)]
    partials = _run_chunks(_mc_chunk, tasks, cfg.workers)
    total = 0.0
    total_sq = 0.0
    for s, sq in partials:
        total += s
        total_sq += sq
    mean = total / n
    if n > 1:
        var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
        std_error = math.sqrt(var / n)
    else:
        std_error = 0.0
    return CorrelationEstimate(mean, std_error, n, "monte-carlo")


def _quadrature_correlation(model, a, b, cfg):
    pts, weights = model.space.quadrature(cfg.sample_count)
    block = QUADRATURE_ROWS * cfg.sample_count
    tasks = [(lo, hi) for _, lo, hi in chunk_bounds(len(weights), block)]

    def run(lo, hi):
        return float(np.dot(weights[lo:hi], model.products(a, b, pts[lo:hi])))

    total = 0.0
    for part in _run_chunks(run, tasks, cfg.workers):
        total += part
    return CorrelationEstimate(total, 0.0, len(weights), "sphere-quadrature")


# --------------------------------------------------------------------------- #
# hidden-variable-conditioned families of two-qubit states                    #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class LambdaConditionedFamily:
    """A map from hidden values to single-spin expectation functions.

    ``marginal_A(d, lam)`` plays the role of ``<psi|sigma_A . d|psi>(lam)``
    and likewise for B. Discrete families carry raw ``weights`` on a
    :class:`DiscreteSpace`, used literally by :func:`bell_product_expectation`.
    If ``state`` is set the family is a decomposition of that particular
    joint state and refuses to be paired with another one.
    """

    name: str
    space: SphereSpace | DiscreteSpace
    marginal_A: Outcome
    marginal_B: Outcome
    state: TwoQubitState | None = None

    @classmethod
    def from_conditional_states(cls, name, states, weights, state=None):
        """Discrete family: ``lam = k`` selects ``states[k]`` with weight ``weights[k]``.

        Marginals are linear in the direction, so each conditional state is
        reduced to its two Bloch vectors once.
        """
        axes = (X, Y, Z)
        bloch_a = np.array([[qm_marginal(s, e, "A") for e in axes] for s in states])
        bloch_b = np.array([[qm_marginal(s, e, "B") for e in axes] for s in states])

        def marginal_A(d, lam):
            return bloch_a[np.asarray(lam).reshape(-1).astype(int)] @ d.vector

        def marginal_B(d, lam):
            return bloch_b[np.asarray(lam).reshape(-1).astype(int)] @ d.vector

        space = DiscreteSpace(tuple(float(w) for w in weights), name=name)
        return cls(name, space, marginal_A, marginal_B, state)

    @classmethod
    def one_point(cls, state: TwoQubitState) -> LambdaConditionedFamily:
        """Trivial family: a single hidden value carrying ``state`` itself."""
        return cls.from_conditional_states("one-point", [state], [1.0], state=state)

    def check_state(self, state: TwoQubitState) -> None:
        if self.state is not None and not self.state.same_ray(state):
            raise ValueError(
                f"family {self.name!r} decomposes {self.state!r}, not {state!r}"
            )


def singlet_basis_family() -> LambdaConditionedFamily:
    """Four computational-basis product states, each with weight 1/2.

    The weights are kept exactly as printed in the four-term expansion of
    the singlet; they sum to 2, not 1.
    """
    pairs = [(UP, DOWN), (DOWN, DOWN), (UP, UP), (DOWN, UP)]
    states = [product_state(x, y) for x, y in pairs]
    return LambdaConditionedFamily.from_conditional_states(
        "singlet-basis", states, [0.5] * 4, state=singlet()
    )


def coherent_product_family() -> LambdaConditionedFamily:
    """``lam`` uniform on the sphere; conditional state ``|+lam>|-lam>``.

    The spin of A points along ``lam`` and that of B opposite, so the
    marginals are ``a . lam`` and ``-b . lam``.
    """
    def marginal_A(d, lam):
        return lam @ d.vector

    def marginal_B(d, lam):
        return -(lam @ d.vector)

    return LambdaConditionedFamily("coherent-product", SphereSpace(), marginal_A, marginal_B)


def bell_product_expectation(
    state: TwoQubitState,
    family: LambdaConditionedFamily,
    a: Direction,
    b: Direction,
    cfg: IntegrationConfig | None = None,
) -> CorrelationEstimate:
    """Integral over ``lam`` of the product of the two single-spin expectations.

    Discrete families are summed exactly with their raw weights. Continuous
    families are integrated according to ``cfg``.
    """
    family.check_state(state)
    if isinstance(family.space, DiscreteSpace):
        lam = np.arange(family.space.size).reshape(-1, 1)
        prod = family.marginal_A(a, lam) * family.marginal_B(b, lam)
        w = np.asarray(family.space.weights)
        return CorrelationEstimate(float(np.dot(w, prod)), 0.0, family.space.size, "exact")
    if cfg is None:
        raise ValueError(f"family {family.name!r} is continuous; an IntegrationConfig is required")
    return lhv_correlation(model_from_family(family), a, b, cfg)


def model_from_family(family: LambdaConditionedFamily, name: str | None = None) -> HiddenVariableModel:
    """Hidden-variable model whose outcomes are the family's marginals.

    Discrete spaces are sampled with normalized probabilities.
    """
    return HiddenVariableModel(name or family.name, family.space, family.marginal_A, family.marginal_B)


# --------------------------------------------------------------------------- #
# literal four-term singlet expansions                                        #
# --------------------------------------------------------------------------- #

def singlet_basis_mixture_expectation(a: Direction, b: Direction) -> float:
    """Four diagonal basis terms, prefactor 1/2, no cross terms.

    Vanishes identically because the sum factors into the traces of the two
    spin operators.
    """
    sa, sb = pauli_dot(a), pauli_dot(b)
    uu_a, dd_a = sa[0, 0].real, sa[1, 1].real
    uu_b, dd_b = sb[0, 0].real, sb[1, 1].real
    return 0.5 * (uu_a * dd_b + dd_a * dd_b + uu_a * uu_b + dd_a * uu_b)


def singlet_qm_decomposition(a: Direction, b: Direction) -> float:
    """Singlet correlation expanded into diagonal and cross bra-ket terms.

    Equal to the operator expectation on the singlet, i.e. ``-a . b``.
    """
    sa, sb = pauli_dot(a), pauli_dot(b)
    value = 0.5 * (
        sa[0, 0] * sb[1, 1]
        - sa[0, 1] * sb[1, 0]
        - sa[1, 0] * sb[0, 1]
        + sa[1, 1] * sb[0, 0]
    )
    if abs(value.imag) >= 1e-10:
        raise ArithmeticError(f"cross-term sum has imaginary residue {value.imag!r}")
    return float(value.real)


# --------------------------------------------------------------------------- #
# joint outcome tables                                                        #
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class JointOutcomeTable:
    """``p[i, j]`` = P(A = s_i, B = s_j) with ``s = (+1, -1)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (2, 2):
            raise ValueError(f"joint table must be 2x2, got {p.shape}")
        if np.any(p < 0):
            raise ValueError("joint probabilities must be non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"joint probabilities sum to {p.sum()!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def marginal_A(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def marginal_B(self) -> np.ndarray:
        return self.p.sum(axis=0)


@dataclass(frozen=True)
class FactorizationReport:
    product_factorizes: bool
    chain_rule_residual: float
    product_residual: float


def joint_outcome_table(state: TwoQubitState, a: Direction, b: Direction) -> JointOutcomeTable:
    """Projective outcome probabilities for ``sigma . a`` on A and ``sigma . b`` on B."""
    psi = state.amplitudes
    p = np.empty((2, 2))
    for i, s in enumerate((1, -1)):
        proj_a = (IDENTITY2 + s * pauli_dot(a)) / 2
        for j, t in enumerate((1, -1)):
            proj_b = (IDENTITY2 + t * pauli_dot(b)) / 2
            p[i, j] = np.vdot(psi, tensor(proj_a, proj_b) @ psi).real
    p = np.clip(p, 0.0, None)
    return JointOutcomeTable(p / p.sum())


def factorization_check(joint: JointOutcomeTable, tolerance: float = 1e-9) -> FactorizationReport:
    """Compare the product-of-marginals factorization with the chain rule.

    The product form ``p(A) p(B)`` only holds for independent outcomes; the
    chain rule ``p(A|B) p(B)`` holds for every table. Cells whose
    conditioning marginal is zero contribute nothing to the chain residual.
    """
    p = joint.p
    pa, pb = joint.marginal_A, joint.marginal_B
    product_residual = float(np.max(np.abs(p - np.outer(pa, pb))))
    chain = 0.0
    for i in range(2):
        for j in range(2):
            if pb[j] == 0.0:
                continue
            conditional = p[i, j] / pb[j]
            chain = max(chain, abs(p[i, j] - conditional * pb[j]))
    return FactorizationReport(
        product_factorizes=product_residual <= tolerance,
        chain_rule_residual=float(chain),
        product_residual=product_residual,
    )


# --------------------------------------------------------------------------- #
# model zoo                                                                   #
# --------------------------------------------------------------------------- #

def _sign(x):
    return np.where(x >= 0.0, 1.0, -1.0)


def sign_model() -> HiddenVariableModel:
    """``A = sign(a . lam)``, ``B = -sign(b . lam)``, ``lam`` uniform on the sphere.

    Its correlation is ``-1 + 2 theta / pi`` for settings at angle ``theta``.
    """
    return HiddenVariableModel(
        "sign",
        SphereSpace(),
        lambda a, lam: _sign(lam @ a.vector),
        lambda b, lam: -_sign(lam @ b.vector),
    )


def trivial_model() -> HiddenVariableModel:
    """Constant outcomes ``A = +1``, ``B = -1``."""
    return HiddenVariableModel(
        "trivial",
        SphereSpace(),
        lambda a, lam: np.ones(len(lam)),
        lambda b, lam: -np.ones(len(lam)),
    )


def coherent_product_model() -> HiddenVariableModel:
    """Expectation-valued outcomes of the coherent product family; correlation ``-a.b/3``."""
    return model_from_family(coherent_product_family(), "coherent-product")


def basis_mixture_model() -> HiddenVariableModel:
    """The four-term basis family, sampled with equal probability; correlation 0."""
    return model_from_family(singlet_basis_family(), "basis-mixture")


MODEL_ZOO: dict[str, Callable[[], HiddenVariableModel]] = {
    "sign": sign_model,
    "trivial": trivial_model,
    "coherent-product": coherent_product_model,
    "basis-mixture": basis_mixture_model,
}


def get_model(name: str) -> HiddenVariableModel:
    try:
        return MODEL_ZOO[name]()
    except KeyError:
        raise KeyError(
            f"unknown hidden-variable model {name!r}; available: {', '.join(sorted(MODEL_ZOO))}"
        ) from None


def sign_model_closed_form(theta: float) -> float:
    """Sign-model correlation at setting angle ``theta`` (radians)."""
    return -1.0 + 2.0 * theta / math.pi
