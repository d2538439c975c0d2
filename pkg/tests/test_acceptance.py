"""End-to-end acceptance checks, one per headline criterion, each printing a PASS/FAIL line."""
import math
import time

import pytest

from kinfrac.report import run_suite


def _checks(rep):
    return {c.name: c for c in rep.checks}


def _verdict(capsys, label, ok, detail=""):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label} {detail}".rstrip())
    assert ok, f"{label}: {detail}"


def _timed(name, cfg=None):
    t0 = time.perf_counter()
    rep = run_suite(name, cfg)
    return rep, time.perf_counter() - t0


def test_exponents(capsys):
    rep, dt = _timed("exponents")
    ch = _checks(rep)
    exact = {"q": "8/3", "rho": "2", "a_exp": "3/4", "b_exp": "1/4", "gamma": "1", "p_lo": "12/7", "p_hi": "4"}
    ok = all(ch[f"{k} exact"].passed for k in exact)
    ok &= ch["identities over rational sweep"].measured == 50 and ch["identities over rational sweep"].passed
    ok &= dt < 1.0
    _verdict(capsys, "exponents: exact values and 50-point identities", ok, f"({dt:.2f}s)")


def test_trajectories(capsys):
    rep, dt = _timed("trajectory-check", {"draws": 20})
    ch = _checks(rep)
    m1 = ch["M1 finite-difference residual"].measured
    m2 = ch["M2 determinant relative residual"].measured
    sl = ch["M3/M4 slope deviation"].measured
    ok = m1 <= 1e-6 and m2 <= 1e-10 and sl <= 0.05 and len(rep.tables["draws"][1]) == 20 and dt < 10
    _verdict(capsys, "trajectories: 20 draws", ok, f"M1={m1:.2e} M2={m2:.2e} slope dev={sl:.3f} ({dt:.1f}s)")


def test_fracops(capsys):
    rep, dt = _timed("decay-check")
    ch = _checks(rep)
    ok = ch["duality residual"].measured <= 1e-3
    ok &= abs(ch["c_gag(1, 1/2) / 2 pi"].measured - 1) <= 0.01
    ok &= abs(ch["Plancherel ratio"].measured - 1) <= 0.01
    ok &= ch["weak vs PV p-Laplacian"].measured <= 0.01
    decay = {"decay slope D^sigma bump": -1.5, "decay slope I^sigma dipole": -1.5,
             "decay slope U": -1.0, "decay slope grad U": -2.0}
    ok &= all(abs(ch[k].measured - v) <= 0.1 for k, v in decay.items())
    ok &= dt < 60
    slopes = " ".join(f"{ch[k].measured:.2f}" for k in decay)
    _verdict(capsys, "fracops: duality, Plancherel, weak=PV, decay", ok, f"slopes {slopes} ({dt:.1f}s)")


def test_kernels(capsys):
    rep, dt = _timed("kernel-bounds")
    ch = _checks(rep)
    ok = all(abs(ch[f"int K_tau = 1 (tau={t:g})"].measured - 1) <= 1e-3 for t in (0.5, 1.0, 2.0))
    ok &= ch["int_w L_r per slice (relative)"].measured <= 1e-8
    slopes = [c for c in rep.checks if c.name.startswith("L^")]
    thetas = {c.name.split()[0] for c in slopes}
    ok &= {"L^1", "L^2", "L^inf"} <= thetas
    ok &= all(abs(c.measured - c.expected) <= 0.05 for c in slopes)
    for k in ("Gv", "G"):
        taus = [r for r in rep.tables["norms"][1] if r[0] == f"int{k}"]
        ok &= len(taus) == 7 and ch[f"integrated {k} weak-norm ratio over tau"].measured <= 10
    ok &= dt < 300
    worst = max(abs(c.measured - c.expected) for c in slopes)
    _verdict(capsys, "kernels: mass, mean zero, norm slopes, integrated weak norm", ok,
             f"worst slope dev {worst:.3f} ({dt:.0f}s)")


def test_representation(capsys):
    t0 = time.perf_counter()
    worst, ok = {}, True
    for model, tol in (("bessel", 1e-2), ("gagliardo", 2e-2)):
        rep = run_suite("representation", {"model": model, "tau": [0.5, 1.0], "points": 10})
        rows = rep.tables["points"][1]
        for tau in ("0.5", "1"):
            d = rep.details[f"tau={tau}"]
            n = sum(1 for r in rows if r[0] == float(tau))
            ok &= d["max_rel"] <= tol and d["nodes_per_point"] <= 100_000 and n == 10
            worst[f"{model}@{tau}"] = d["max_rel"]
    dt = time.perf_counter() - t0
    ok &= dt < 600
    _verdict(capsys, "representation: Bessel and Gagliardo identities", ok,
             " ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f" ({dt:.0f}s)")


def test_scale_invariance(capsys):
    rep = run_suite("gn-check", {"model": "bessel"})
    ch = _checks(rep)
    inv = rep.details["invariance"]
    ok = list(inv["factors"]) == [0.5, 1.0, 2.0]
    ok &= ch["lambda-scaling spread"].measured <= 0.02 and ch["nu-rescaling spread"].measured <= 0.02
    sup = _checks(run_suite("suppression"))["operator-norm proxy tau-slope"]
    ok &= sup.expected == pytest.approx(-0.5) and abs(sup.measured + 0.5) <= 0.1
    _verdict(capsys, "scale invariance: GN spread and T_K suppression", ok,
             f"lambda {inv['lambda_spread']:.1e} nu {inv['nu_spread']:.1e} slope {sup.measured:.3f}")


def test_critical_integration(capsys):
    rep, dt = _timed("critical-integration")
    ch = _checks(rep)
    ok = True
    for tag, lam in (("(1,1)", 0.5), ("(1/2,3/2)", 0.25)):
        t = f"(mu,nu)={tag}"
        ok &= ch[f"weak-norm ratio {t}"].measured <= 10 and ch[f"uniform {t}"].passed
        ok &= ch[f"negative control theta-0.3 fails {t}"].passed
        ok &= abs(ch[f"K-functional slope {t}"].measured - lam) <= 0.05
    ok &= dt < 30
    ks = " ".join(f"{c.measured:.3f}" for c in rep.checks if c.name.startswith("K-functional"))
    _verdict(capsys, "critical integration: uniform weak norm, control, K-slope", ok, f"K-slopes {ks} ({dt:.1f}s)")


def test_kolmogorov(capsys):
    rep = run_suite("oracle-kolmogorov")
    ch = _checks(rep)
    ok = ch["Fourier PDE residual"].measured <= 1e-8
    ok &= ch["energy nonincreasing"].passed
    ok &= ch["p=2 GN ratio finite"].passed and math.isfinite(ch["p=2 GN ratio finite"].measured)
    ok &= ch["nu-rescaling spread"].measured <= 0.02
    _verdict(capsys, "Kolmogorov oracle: residual, energy, p=2 GN", ok,
             f"residual {ch['Fourier PDE residual'].measured:.1e} nu spread {ch['nu-rescaling spread'].measured:.1e}")
