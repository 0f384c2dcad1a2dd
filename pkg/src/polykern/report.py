"""Run configurations, verification suites and their reports.

Each suite is a group of named checks. A check receives the run
configuration and its own generator, seeded from ``(seed, crc32(name))``,
so results do not depend on scheduling or on which other suites ran.
"""

from __future__ import annotations

import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import analysis as an
from . import hilbert as hb
from . import multiindex as mi
from ._linalg import relative_residual
from .errors import ConfigError, GuardError, NoWitnessError, PolykernError
from .kernels import (
    DEFAULT_NODES,
    DEFAULT_RADIUS,
    KernelParams,
    gram_matrix,
    kernel_canonical,
    kernel_direct_sum,
    random_points,
    taylor_coefficients,
    tensor_kernel,
)
from .mobius import LiftedMobiusTuple, cocycle_eval, cocycle_factored, compose_lifted, act
from .serialize import dumps, summary_csv

DEFAULT_TOLERANCES = {
    "canonical": 1e-10,
    "psd": 1e-10,
    "reproducing": 1e-10,
    "gamma-injective": 1e-10,
    "quasi-invariance": 1e-9,
    "cocycle-identity": 1e-9,
    "factorization": 1e-12,
    "intertwining": 1e-8,
    "boundedness": 1e-10,
    "curvature-oracle": 1e-7,
    "curvature-trace": 1e-12,
    "curvature-diagonal": 1e-9,
    "recover-lambda": 1e-9,
    "axis-support": 1e-8,
    "witness-entry": 1e-10,
    "tensor-baseline": 1e-12,
}

SUITES = (
    "psd",
    "quasi-invariance",
    "canonical",
    "cocycle-identity",
    "intertwining",
    "boundedness",
    "curvature",
    "irreducibility",
    "classify",
    "witness",
)

ANGLE = 10.0  # lifted angles are drawn from (-ANGLE, ANGLE)


@dataclass
class RunConfig:
    params: KernelParams
    seed: int = 0
    samples: int = 30
    degree: int | None = None
    taylor_order: int | None = None
    tolerances: dict = field(default_factory=dict)
    radius: float = DEFAULT_RADIUS
    nodes: int = DEFAULT_NODES
    mobius: list = field(default_factory=list)
    polynomial: dict | None = None

    def __post_init__(self):
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        if self.degree is None:
            self.degree = sum(self.params.alpha) + 4

    def tol(self, key):
        return self.tolerances[key]

    def to_json(self) -> dict:
        out = self.params.to_json()
        out.update(
            seed=self.seed,
            samples=self.samples,
            degree=self.degree,
            taylor_order=self.taylor_order,
            tolerances=dict(self.tolerances),
            quadrature={"radius": self.radius, "nodes": self.nodes},
        )
        if self.mobius:
            out["mobius"] = [g.to_json() for g in self.mobius]
        if self.polynomial is not None:
            out["polynomial"] = hb.poly_to_json(self.polynomial)
        return out


# ------------------------------------------------------------------ loading

_KEYS = {"n", "alpha", "lambda", "mu", "seed", "samples", "degree", "taylor_order", "tolerances", "quadrature", "mobius", "polynomial"}


def _int(value, path, low=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ConfigError(path, f"must be >= {low}, got {value}")
    return value


def _real(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return float(value)


def _index(key, n, path):
    try:
        m = mi.parse_multiindex(key)
    except (ValueError, PolykernError) as exc:
        raise ConfigError(path, f"bad multi-index {key!r}") from exc
    if len(m) != n:
        raise ConfigError(path, f"multi-index {key!r} has {len(m)} entries, expected {n}")
    return m


def config_from_dict(data, overrides=None) -> RunConfig:
    """Validate a config mapping; errors name the offending field."""
    if not isinstance(data, dict):
        raise ConfigError("$", "config must be a JSON object")
    data = {**data, **{k: v for k, v in (overrides or {}).items() if v is not None and k != "quadrature"}}
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    for key in ("alpha", "lambda"):
        if key not in data:
            raise ConfigError(key, "required field missing")
    if not isinstance(data["alpha"], list) or not data["alpha"]:
        raise ConfigError("alpha", "expected a non-empty list")
    alpha = tuple(_int(a, f"alpha[{k}]", 0) for k, a in enumerate(data["alpha"]))
    n = len(alpha)
    if "n" in data and _int(data["n"], "n", 1) != n:
        raise ConfigError("n", f"n = {data['n']} but alpha has {n} entries")
    lam = data["lambda"]
    if not isinstance(lam, list) or len(lam) != n:
        raise ConfigError("lambda", f"expected a list of {n} numbers")
    lam = tuple(_real(x, f"lambda[{k}]", positive=True) for k, x in enumerate(lam))

    fam = mi.index_family(alpha)
    mu = {m: 1.0 for m in fam}
    raw_mu = data.get("mu", {})
    if not isinstance(raw_mu, dict):
        raise ConfigError("mu", "expected an object keyed by multi-indices")
    for key, value in raw_mu.items():
        m = _index(key, n, f"mu.{key}")
        if m not in fam:
            raise ConfigError(f"mu.{key}", f"{key} is not in the index family of {list(alpha)}")
        mu[m] = _real(value, f"mu.{key}", positive=True)
    if mu[(0,) * n] != 1.0:
        raise ConfigError(f"mu.{mi.format_multiindex((0,) * n)}", "weight at the zero index must be 1")
    params = KernelParams.create(alpha, lam, mu)

    seed = _int(data.get("seed", 0), "seed", 0)
    samples = _int(data.get("samples", 30), "samples", 1)
    degree = data.get("degree")
    if degree is not None:
        degree = _int(degree, "degree", sum(alpha) + 2)
    order = data.get("taylor_order")
    if order is not None:
        order = _int(order, "taylor_order", 2)

    tols = data.get("tolerances", {})
    if not isinstance(tols, dict):
        raise ConfigError("tolerances", "expected an object")
    for key, value in tols.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances.{key}", "unknown tolerance name")
        _real(value, f"tolerances.{key}", positive=True)

    quad = {**data.get("quadrature", {}), **(overrides or {}).get("quadrature", {})}
    quad = {k: v for k, v in quad.items() if v is not None}
    unknown = sorted(set(quad) - {"radius", "nodes"})
    if unknown:
        raise ConfigError(f"quadrature.{unknown[0]}", "unknown field")
    radius = _real(quad.get("radius", DEFAULT_RADIUS), "quadrature.radius", positive=True)
    if radius >= 1:
        raise ConfigError("quadrature.radius", f"must be < 1, got {radius}")
    nodes = _int(quad.get("nodes", DEFAULT_NODES), "quadrature.nodes", 8)

    mobius = []
    for k, entry in enumerate(data.get("mobius", [])):
        path = f"mobius[{k}]"
        if not isinstance(entry, list) or len(entry) != n:
            raise ConfigError(path, f"expected a list of {n} factors")
        try:
            mobius.append(LiftedMobiusTuple.from_json(entry))
        except (KeyError, TypeError, PolykernError) as exc:
            raise ConfigError(path, f"bad factor list ({exc})") from exc

    poly = None
    if "polynomial" in data:
        raw = data["polynomial"]
        if not isinstance(raw, dict) or not raw:
            raise ConfigError("polynomial", "expected a non-empty object keyed by multi-indices")
        poly = {}
        for key, value in raw.items():
            m = _index(key, n, f"polynomial.{key}")
            if not isinstance(value, list) or len(value) != 2:
                raise ConfigError(f"polynomial.{key}", "expected [re, im]")
            poly[m] = complex(_real(value[0], f"polynomial.{key}[0]"), _real(value[1], f"polynomial.{key}[1]"))

    return RunConfig(params, seed, samples, degree, order, dict(tols), radius, nodes, mobius, poly)


def load_config(path, overrides=None) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(data, overrides)


# ------------------------------------------------------------------ results


@dataclass
class CheckResult:
    check: str
    residual: float
    threshold: float
    verdict: str
    comparison: str = "<="
    inputs: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)
    wall_time: float | None = None

    def to_json(self, timings=False) -> dict:
        out = {
            "check": self.check,
            "comparison": self.comparison,
            "inputs": self.inputs,
            "residual": self.residual,
            "threshold": self.threshold,
            "verdict": self.verdict,
        }
        if self.detail:
            out["detail"] = self.detail
        if timings and self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out


def _judge(name, value, threshold, comparison="<=", **kw):
    value = float(value)
    ok = math.isfinite(value) and (value <= threshold if comparison == "<=" else value >= threshold)
    return CheckResult(name, value, float(threshold), "pass" if ok else "fail", comparison, **kw)


@dataclass
class VerificationReport:
    config: dict
    suite: str
    checks: list
    version: str = __version__

    @property
    def overall(self) -> str:
        return "pass" if all(c.verdict in ("pass", "skipped") for c in self.checks) else "fail"

    @property
    def exit_code(self) -> int:
        if any(c.verdict == "guard" for c in self.checks):
            return 2
        return 0 if self.overall == "pass" else 1

    def to_json(self, timings=False) -> dict:
        return {
            "config": self.config,
            "suite": self.suite,
            "checks": [c.to_json(timings) for c in self.checks],
            "overall": self.overall,
            "version": self.version,
        }


# ------------------------------------------------------------------ checks


def _random_tuples(cfg, rng, count):
    out = list(cfg.mobius[:count])
    while len(out) < count:
        out.append(LiftedMobiusTuple.random(rng, cfg.params.n, angle=ANGLE))
    return out


def check_canonical(cfg, rng):
    p = cfg.params
    z, w = random_points(rng, cfg.samples, p.n), random_points(rng, cfg.samples, p.n)
    res = relative_residual(kernel_direct_sum(p, z, w), kernel_canonical(p, z, w)).max()
    return [_judge("canonical.direct-sum", res, cfg.tol("canonical"), inputs={"pairs": cfg.samples})]


def _psd_ratio(G):
    ev = np.linalg.eigvalsh(G)
    return max(0.0, -ev[0]) / max(ev[-1], np.finfo(float).tiny)


def check_psd(cfg, rng):
    p = cfg.params
    pts = random_points(rng, cfg.samples, p.n)
    out = [_judge("psd.gram", _psd_ratio(gram_matrix(p, pts)), cfg.tol("psd"), inputs={"points": cfg.samples})]

    model = hb.TruncatedSpaceModel(p, cfg.degree)
    low = hb.monomials(p.n, cfg.degree - 2)
    worst = 0.0
    for _ in range(3):
        F = {b: {m: complex(*rng.normal(size=2)) for m in low} for b in p.family}
        w = random_points(rng, 1, p.n)[0]
        xi = rng.normal(size=p.r) + 1j * rng.normal(size=p.r)
        lhs = model.inner(F, model.kernel_section(w, xi))
        rhs = np.vdot(xi, model.gamma(F)(w))
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    out.append(_judge("psd.reproducing", worst, cfg.tol("reproducing"), inputs={"degree": cfg.degree, "trials": 3}))
    sv = np.linalg.svd(model.gamma_matrix(), compute_uv=False)
    out.append(_judge("psd.gamma-injective", sv[-1], cfg.tol("gamma-injective"), ">=", inputs={"degree": cfg.degree}))
    return out


def check_quasi_invariance(cfg, rng):
    p = cfg.params
    worst = 0.0
    for g in _random_tuples(cfg, rng, cfg.samples):
        z, w = random_points(rng, 2, p.n)
        lhs = kernel_canonical(p, z, w)
        Jz, Jw = cocycle_eval(g, z, p), cocycle_eval(g, w, p)
        rhs = Jz @ kernel_canonical(p, act(g, z), act(g, w)) @ Jw.conj().T
        worst = max(worst, relative_residual(lhs, rhs))
    return [_judge("quasi-invariance", worst, cfg.tol("quasi-invariance"), inputs={"triples": cfg.samples})]


def check_cocycle(cfg, rng):
    p = cfg.params
    worst = 0.0
    for _ in range(cfg.samples):
        g1, g2 = (LiftedMobiusTuple.random(rng, p.n, angle=ANGLE) for _ in range(2))
        z = random_points(rng, 1, p.n)[0]
        h = compose_lifted(g1, g2)
        rhs = cocycle_eval(g2, z, p) @ cocycle_eval(g1, act(g2, z), p)
        worst = max(worst, relative_residual(cocycle_eval(h, z, p), rhs))
    out = [_judge("cocycle-identity.composition", worst, cfg.tol("cocycle-identity"), inputs={"pairs": cfg.samples})]

    worst = 0.0
    for z in random_points(rng, cfg.samples, p.n):
        worst = max(worst, relative_residual(cocycle_factored(z, p), cocycle_eval(LiftedMobiusTuple.phi(z), z, p)))
    out.append(_judge("cocycle-identity.factorization", worst, cfg.tol("factorization"), inputs={"points": cfg.samples}))
    return out


def _random_polynomial(rng, n, degree=3, terms=3):
    pool = hb.monomials(n, degree)
    picks = rng.choice(len(pool), size=min(terms, len(pool)), replace=False)
    return {pool[k]: complex(*rng.normal(size=2)) for k in sorted(picks)}


def check_intertwining(cfg, rng):
    p = cfg.params
    worst = 0.0
    count = 0
    gs = _random_tuples(cfg, rng, cfg.samples)
    for k, g in enumerate(gs):
        beta = p.family.members[k % p.r]
        f = cfg.polynomial if cfg.polynomial is not None else _random_polynomial(rng, p.n)
        z = random_points(rng, 1, p.n)
        worst = max(worst, hb.verify_intertwining(beta, p, g, f, z))
        count += 1
    return [_judge("intertwining", worst, cfg.tol("intertwining"), inputs={"cases": count})]


def check_boundedness(cfg, rng):
    p = cfg.params
    wit = an.boundedness_witness(p)
    z, w = random_points(rng, cfg.samples, p.n), random_points(rng, cfg.samples, p.n)
    tol = cfg.tol("boundedness")
    out = [_judge("boundedness.factorization", wit.factorization_residual(z, w), tol, inputs={"pairs": cfg.samples}, detail=wit.to_json())]
    pts = random_points(rng, cfg.samples, p.n)
    for j in range(p.n):
        out.append(_judge(f"boundedness.gram[{j}]", _psd_ratio(wit.scaled_gram(pts, j)), tol, inputs={"points": cfg.samples}))
    return out


def check_curvature(cfg, rng):
    p = cfg.params
    raw = taylor_coefficients(p, 2, False, cfg.radius, cfg.nodes)
    nrm = taylor_coefficients(p, 2, True, cfg.radius, cfg.nodes) if p.n > 1 else None
    worst = diag = 0.0
    for i in range(p.n):
        for j in range(p.n):
            closed = an.curvature_closed(p, i, j).matrix
            oracle = an.curvature_oracle(p, i, j, coefficients=raw if i == j else nrm)
            worst = max(worst, np.abs(oracle - closed).max() / max(1.0, np.abs(closed).max()))
            if i == j:
                diag = max(diag, np.abs(oracle - np.diag(np.diag(oracle))).max())
    out = [
        _judge("curvature.oracle", worst, cfg.tol("curvature-oracle"), inputs={"order": 2, "radius": cfg.radius, "nodes": cfg.nodes}),
        _judge("curvature.diagonal", diag, cfg.tol("curvature-diagonal")),
    ]
    trace_err = max(
        abs(an.curvature_closed(p, i, i).trace - (p.r * p.lam[i] + 2 * p.family.degrees(i).sum())) for i in range(p.n)
    )
    out.append(_judge("curvature.trace", trace_err, cfg.tol("curvature-trace")))
    worst = 0.0
    for _ in range(10):
        mu = np.concatenate([[1.0], rng.uniform(0.5, 2.0, p.r - 1)])
        got = an.recover_lambda(p.replace(mu=mu))
        worst = max(worst, np.abs(np.subtract(got, p.lam)).max())
    out.append(_judge("curvature.recover-lambda", worst, cfg.tol("recover-lambda"), inputs={"weights": 10}))
    return out


def check_irreducibility(cfg, rng):
    p = cfg.params
    order = cfg.taylor_order if cfg.taylor_order is not None else 2 * sum(p.alpha) + 2
    cert = an.irreducibility_certificate(p, order, taylor_coefficients(p, order, True, cfg.radius, cfg.nodes))
    res = _judge("irreducibility.commutant", cert.commutant_dimension - 1, 0, inputs={"order": order}, detail=cert.to_json())
    if not cert.irreducible:
        res.verdict = "inconclusive"
    out = [res]
    qmax = max(p.alpha) + 1
    missing, off = 0, 0.0
    for i in range(p.n):
        d = an.axis_diagnostic(p, i, qmax)
        missing += len(d.missing)
        off = max(off, d.off_pattern)
    axis = _judge("irreducibility.axis-links", missing, 0, inputs={"qmax": qmax})
    if missing:
        axis.verdict = "inconclusive"
    out.append(axis)
    out.append(_judge("irreducibility.axis-support", off, cfg.tol("axis-support"), inputs={"qmax": qmax}))
    return out


def check_classify(cfg, rng):
    p = cfg.params
    same = an.classify_pair(p, p)
    out = [_judge("classify.reflexive", 0 if same.equivalent else 1, 0)]
    shifted = an.classify_pair(p, p.replace(lam=np.add(p.lam, 0.5)))
    ok = not shifted.equivalent and shifted.witness["kind"] == "trace"
    out.append(_judge("classify.lambda-shift", 0 if ok else 1, 0, detail=shifted.to_json()))
    if p.r > 1:
        mu = p.mu_vector.copy()
        mu[-1] *= 2
        moved = an.classify_pair(p, p.replace(mu=mu))
        ok = not moved.equivalent and moved.witness["kind"] == "B"
        out.append(_judge("classify.mu-shift", 0 if ok else 1, 0, detail=moved.to_json()))
    return out


def check_witness(cfg, rng):
    p = cfg.params
    w = an.inequivalence_witness(p.alpha)
    holds = an.witness_holds(p.family, w)
    out = [_judge("witness.membership", 0 if holds else 1, 0, detail=w.to_json())]
    entry, predicted = an.witness_entry(p, w)
    err = abs(entry - predicted) / predicted if predicted > cfg.tol("witness-entry") else math.inf
    out.append(_judge("witness.entry", err, cfg.tol("witness-entry"), detail={"entry": entry, "predicted": predicted}))
    tensor = tensor_kernel(list(p.lam))
    mixed = max(
        np.abs(an.curvature_oracle(tensor, i, j, True, radius=cfg.radius, nodes=cfg.nodes)).max()
        for i in range(p.n)
        for j in range(p.n)
        if i != j
    )
    out.append(_judge("witness.tensor-baseline", mixed, cfg.tol("tensor-baseline")))
    return out


CHECKS = {
    "psd": check_psd,
    "quasi-invariance": check_quasi_invariance,
    "canonical": check_canonical,
    "cocycle-identity": check_cocycle,
    "intertwining": check_intertwining,
    "boundedness": check_boundedness,
    "curvature": check_curvature,
    "irreducibility": check_irreducibility,
    "classify": check_classify,
    "witness": check_witness,
}


def check_rng(seed, name):
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _run_one(cfg, name, implicit):
    start = time.perf_counter()
    try:
        results = CHECKS[name](cfg, check_rng(cfg.seed, name))
    except NoWitnessError as exc:
        # outside the witness hypothesis: an explicit request is a guard violation
        verdict = "skipped" if implicit else "guard"
        results = [CheckResult(name, math.nan, math.nan, verdict, detail={"error": str(exc)})]
    except GuardError as exc:
        results = [CheckResult(name, math.nan, math.nan, "guard", detail={"error": str(exc)})]
    except PolykernError as exc:
        results = [CheckResult(name, math.nan, math.nan, "error", detail={"error": str(exc)})]
    elapsed = time.perf_counter() - start
    for r in results:
        r.wall_time = elapsed
    return results


def run_suite(cfg: RunConfig, suite="all", workers=4) -> VerificationReport:
    if suite != "all" and suite not in CHECKS:
        raise ConfigError("suite", f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    names = list(SUITES) if suite == "all" else [suite]
    with ThreadPoolExecutor(max(1, workers)) as pool:
        groups = list(pool.map(lambda nm: _run_one(cfg, nm, suite == "all"), names))
    checks = sorted((c for g in groups for c in g), key=lambda c: c.check)
    return VerificationReport(cfg.to_json(), suite, checks)


def emit_report(report: VerificationReport, fmt="json", path=None, timings=False) -> str:
    """Serialize ``report``; writes to ``path`` when given and returns the text."""
    if fmt == "json":
        text = dumps(report.to_json(timings))
    elif fmt == "csv-summary":
        text = summary_csv((c.check, c.residual, c.threshold, c.verdict) for c in report.checks)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
