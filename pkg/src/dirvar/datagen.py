"""Synthetic ground truth: patterned transition matrices and matching covariances.

Patterns (``d x d`` supports, diagonal always included):

band
    ``|i - j| <= bandwidth``.
cluster
    dense diagonal blocks of ``block_size``.
hub
    ``hub_count`` evenly spaced hub nodes whose rows and columns are dense;
    every other node only keeps its diagonal entry.
random
    each off-diagonal pair present independently with ``edge_prob``.
scalefree
    preferential attachment with ``attach_count`` edges per new node.

Off-diagonal supports are symmetric; the values are not.  Every nonzero
entry is ``+-0.5`` with an independent fair sign before rescaling.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import BadParams, NotPsd, NotStationary, ZeroMatrix
from .linalg import NormKind, as_matrix, matrix_norm, min_ldl_pivot, read_matrix_csv, write_matrix_csv
from .varproc import VarModel, is_stationary, stationary_covariance

MAGNITUDE = 0.5
PSD_TOL = 1e-10


class Pattern(Enum):
    BAND = "band"
    CLUSTER = "cluster"
    HUB = "hub"
    RANDOM = "random"
    SCALEFREE = "scalefree"


_PARAM_NAME = {
    Pattern.BAND: "bandwidth",
    Pattern.CLUSTER: "block_size",
    Pattern.HUB: "hub_count",
    Pattern.RANDOM: "edge_prob",
    Pattern.SCALEFREE: "attach_count",
}


def default_param(kind, d):
    kind = Pattern(kind)
    if kind is Pattern.BAND:
        return 2
    if kind is Pattern.CLUSTER:
        return max(1, d // 5)
    if kind is Pattern.HUB:
        return max(1, d // 10)
    if kind is Pattern.RANDOM:
        return min(1.0, 3.0 / d)
    return 2


@dataclass(frozen=True)
class PatternKind:
    tag: Pattern
    param: float = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Pattern(self.tag))

    def resolved(self, d):
        return default_param(self.tag, d) if self.param is None else self.param

    @property
    def param_name(self):
        return _PARAM_NAME[self.tag]


class SigmaKind(Enum):
    DIAGONAL = "diagonal"
    TOEPLITZ = "toeplitz"


@dataclass(frozen=True)
class SigmaSpec:
    tag: SigmaKind = SigmaKind.DIAGONAL
    rho: float = None

    def __post_init__(self):
        object.__setattr__(self, "tag", SigmaKind(self.tag))
        if self.tag is SigmaKind.TOEPLITZ and (self.rho is None or not 0.0 < self.rho < 1.0):
            raise BadParams(f"Toeplitz rho must lie in (0, 1), got {self.rho}")


def _check_param(kind, param, d):
    if kind is Pattern.RANDOM:
        if not 0.0 <= param <= 1.0:
            raise BadParams(f"edge_prob must lie in [0, 1], got {param}")
        return float(param)
    if int(param) != param or not 1 <= param <= d:
        raise BadParams(f"{_PARAM_NAME[kind]} must be an integer in [1, {d}], got {param}")
    return int(param)


def hub_nodes(d, hub_count):
    return np.arange(d)[:: max(1, d // hub_count)][:hub_count]


def pattern_support(kind, d, seed, param=None):
    """Boolean ``d x d`` support of a pattern (diagonal included)."""
    kind = Pattern(kind)
    if d < 2:
        raise BadParams("d must be at least 2")
    param = _check_param(kind, default_param(kind, d) if param is None else param, d)
    rng = np.random.default_rng(seed)
    idx = np.arange(d)
    mask = np.eye(d, dtype=bool)
    if kind is Pattern.BAND:
        mask |= np.abs(idx[:, None] - idx[None, :]) <= param
    elif kind is Pattern.CLUSTER:
        block = idx // param
        mask |= block[:, None] == block[None, :]
    elif kind is Pattern.HUB:
        hubs = hub_nodes(d, param)
        mask[hubs, :] = True
        mask[:, hubs] = True
    elif kind is Pattern.RANDOM:
        upper = np.triu(rng.random((d, d)) < param, 1)
        mask |= upper | upper.T
    else:
        mask |= _preferential_attachment(d, param, rng)
    return mask


def _preferential_attachment(d, m, rng):
    """Symmetric adjacency of a Barabasi-Albert graph on ``d`` nodes."""
    adj = np.zeros((d, d), dtype=bool)
    m = min(m, d - 1)
    # seed graph: a star on the first m + 1 nodes
    for v in range(1, m + 1):
        adj[0, v] = adj[v, 0] = True
    targets_pool = [0] * m + list(range(1, m + 1))
    for new in range(m + 1, d):
        chosen = set()
        while len(chosen) < m:
            chosen.add(targets_pool[rng.integers(len(targets_pool))])
        for v in sorted(chosen):
            adj[new, v] = adj[v, new] = True
            targets_pool.extend([new, v])
    return adj


def gen_pattern(kind, d, seed, param=None):
    """Patterned matrix with entries ``+-0.5`` on the support, zero elsewhere."""
    if isinstance(kind, PatternKind):
        kind, param = kind.tag, kind.param if param is None else param
    mask = pattern_support(kind, d, seed, param)
    # signs come from a stream independent of the one that drew the support
    signs = np.where(np.random.default_rng([seed, 1]).random((d, d)) < 0.5, -1.0, 1.0)
    return np.where(mask, MAGNITUDE * signs, 0.0)


def rescale_spectral(a, kappa):
    """Scale ``a`` so its spectral norm equals ``kappa``."""
    a = as_matrix(a)
    if kappa <= 0:
        raise BadParams("kappa must be positive")
    nrm = matrix_norm(a, NormKind.SPECTRAL)
    if nrm == 0.0:
        raise ZeroMatrix("cannot rescale the zero matrix")
    return a * (kappa / nrm)


def make_sigma(sigma_spec, d, a1_norm2=None):
    """Marginal covariance: ``2 |A_1|_2 I`` (diagonal) or ``rho**|i-j|`` (Toeplitz)."""
    if not isinstance(sigma_spec, SigmaSpec):
        sigma_spec = SigmaSpec(sigma_spec)
    if sigma_spec.tag is SigmaKind.DIAGONAL:
        if a1_norm2 is None or a1_norm2 <= 0:
            raise BadParams("the diagonal covariance needs a positive a1_norm2")
        return 2.0 * a1_norm2 * np.eye(d)
    idx = np.arange(d)
    return sigma_spec.rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def derive_psi(sigma, a1):
    """Noise covariance ``Sigma - A_1' Sigma A_1`` that makes ``Sigma`` stationary."""
    sigma = as_matrix(sigma, "sigma")
    a1 = as_matrix(a1, "a1")
    if sigma.shape != a1.shape or sigma.shape[0] != sigma.shape[1]:
        raise BadParams(f"shape mismatch: sigma {sigma.shape}, a1 {a1.shape}")
    psi = sigma - a1.T @ sigma @ a1
    psi = 0.5 * (psi + psi.T)
    scale = max(1.0, float(np.max(np.abs(np.diag(sigma)))))
    if min_ldl_pivot(psi) < -PSD_TOL * scale:
        raise NotPsd("Sigma - A' Sigma A is not positive semidefinite")
    return psi


def make_var1_model(a1, sigma_spec):
    """VAR(1) model and its marginal covariance from an already rescaled ``A_1``."""
    a1 = as_matrix(a1)
    sigma = make_sigma(sigma_spec, a1.shape[0], matrix_norm(a1, NormKind.SPECTRAL))
    model = VarModel((a1,), derive_psi(sigma, a1))
    if not is_stationary(model):
        raise NotStationary("generated VAR(1) model is not stationary")
    return model, sigma


def make_varp_model(patterns, kappa_per_lag, psi):
    """Rescale each lag to spectral norm ``kappa_per_lag`` and solve for ``Sigma~``."""
    lags = tuple(rescale_spectral(a, kappa_per_lag) for a in patterns)
    model = VarModel(lags, as_matrix(psi, "psi"))
    if not is_stationary(model):
        raise NotStationary("companion matrix fails the stability check")
    return model, stationary_covariance(model)


@dataclass(frozen=True)
class ModelMeta:
    d: int
    p: int
    kappa: float
    pattern: str
    seed: int
    extra: dict = field(default_factory=dict)


def write_model_bundle(directory, model, meta):
    """Write ``A_k.csv``, ``psi.csv`` and ``meta.json`` into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for k, a in enumerate(model.transitions, start=1):
        write_matrix_csv(out / f"A_{k}.csv", a)
    write_matrix_csv(out / "psi.csv", model.noise_cov)
    payload = {"d": meta.d, "p": meta.p, "kappa": meta.kappa, "pattern": meta.pattern, "seed": meta.seed}
    payload.update(meta.extra)
    (out / "meta.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return out


def read_model_bundle(directory):
    src = Path(directory)
    meta = json.loads((src / "meta.json").read_text())
    p = int(meta["p"])
    lags = tuple(read_matrix_csv(src / f"A_{k}.csv") for k in range(1, p + 1))
    psi_path = src / "psi.csv"
    psi = read_matrix_csv(psi_path) if psi_path.exists() else np.eye(lags[0].shape[0])
    return VarModel(lags, psi), meta
