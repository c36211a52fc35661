"""Text and JSON renderings of the library's results.

Every renderer returns a pair (text, data) where data is plain JSON.  Sets
of points are listed in the structure's point order so the output is the
same on every run.
"""
from __future__ import annotations

import json

DELIM = "--- json ---"


def emit(text: str, data=None) -> str:
    out = text.rstrip("\n") + "\n"
    if data is not None:
        out += DELIM + "\n" + json.dumps(data, sort_keys=True) + "\n"
    return out


def pts(s, names) -> list:
    return s.ordered(names)


def braces(s, names) -> str:
    return "{" + ",".join(pts(s, names)) + "}"


# ---------------------------------------------------------------- pairs

def pair_data(s, gp) -> dict:
    d = {"A": pts(s, gp.A), "B": pts(s, gp.B), "kind": gp.kind, "code": gp.code.hex, "delta_B": gp.delta_B}
    if gp.extended_base is not None:
        d["extended_base"] = pts(s, gp.extended_base)
    return d


def good_pairs(s, pairs, chis=None):
    rows, data = [], []
    for k, gp in enumerate(pairs):
        d = pair_data(s, gp)
        line = f"{braces(s, gp.A)} / {braces(s, gp.B)}  {gp.kind}  delta(B)={gp.delta_B}  code={gp.code.hex[:12]}"
        if chis is not None:
            d["chi"] = chis[k]
            line += f"  chi={chis[k]}"
        rows.append(line)
        data.append(d)
    return "\n".join([f"{len(pairs)} good pair types"] + rows), {"pairs": data}


def lmu(s, res, mu):
    if res.ok:
        text = f"in L_mu: yes (mu(alpha)={mu.alpha_value})"
    else:
        text = "\n".join([f"in L_mu: no, {len(res.violations)} violation(s)"] +
                         [f"  {braces(s, A)} / {braces(s, B)}  chi={c} > mu={m}" for _, c, m, A, B in res.violations])
    data = {"ok": res.ok, "violations": [{"code": code.hex, "chi": c, "mu": m, "A": pts(s, A), "B": pts(s, B)}
                                         for code, c, m, A, B in res.violations]}
    return text, data


# ---------------------------------------------------------------- decompositions

def linear_decomposition(ld):
    s = ld.ambient
    lines = [f"chain of length {len(ld)}", f"A0 = {braces(s, ld.chain[0])}"]
    steps = []
    for k, st in enumerate(ld.steps, 1):
        line = f"A{k} = A{k - 1} + {braces(s, st.ext)} over {braces(s, st.base)}"
        d = {"ext": pts(s, st.ext), "base": pts(s, st.base)}
        if st.extended_base is not None:
            line += f" (extended base {braces(s, st.extended_base)})"
            d["extended_base"] = pts(s, st.extended_base)
        lines.append(line)
        steps.append(d)
    return "\n".join(lines), {"chain": [pts(s, c) for c in ld.chain], "steps": steps}


def tree(td):
    s = td.ambient
    d0, parts = td.zero_parts
    out = [f"{td.group} decomposition over {braces(s, td.base)}, height {td.height}",
           f"stratum 0: {braces(s, td.strata[0])}",
           f"  D0 = {braces(s, d0)}"]
    out += [f"  D{k} = {braces(s, p)}" for k, p in enumerate(parts, 1)]
    clusters = []
    for m in range(1, td.height + 1):
        out.append(f"stratum {m}")
        for c in td.clusters_at(m):
            flags = [f"ell={c.ell}", f"nu={c.nu}"]
            if c.mu is not None:
                flags.append(f"mu={c.mu}")
            flags += [w for w, on in (("well-placed", c.well_placed), ("transitive", c.transitive),
                                      ("linear", c.linear_cluster), ("symmetric", c.symmetric)) if on]
            out.append(f"  cluster {c.id} over {braces(s, c.base)}  " + " ".join(flags))
            for pid in c.petals:
                out.append(f"    petal {pid} {braces(s, td.petal(pid).points)}")
            for cp in c.copies:
                out.append(f"    copy {braces(s, cp)}")
            clusters.append({
                "id": c.id, "stratum": c.stratum, "j": c.j, "base": pts(s, c.base), "code": c.code,
                "petals": [{"id": p, "points": pts(s, td.petal(p).points)} for p in c.petals],
                "copies": [pts(s, cp) for cp in c.copies], "ell": c.ell, "nu": c.nu, "mu": c.mu,
                "well_placed": c.well_placed, "transitive": c.transitive, "linear": c.linear_cluster,
                "symmetric": c.symmetric, "accounting_ok": c.accounting_ok,
            })
    data = {
        "base": list(td.base), "group": td.group, "height": td.height,
        "strata": [pts(s, x) for x in td.strata],
        "zero_parts": {"D0": pts(s, d0), "D": [pts(s, p) for p in parts]},
        "clusters": clusters,
        "j_classes": {str(m): v for m, v in sorted(td.j_classes.items())},
    }
    return "\n".join(out), data


def bouquet(s, bq):
    out = [f"{len(bq.flowers)} flower(s); distinct flowers share no petal: {'yes' if bq.law_ok else 'no'}"]
    data = []
    for f in bq.flowers:
        out.append(f"flower over ({','.join(f.base_arrangement)}): {len(f.petals)} petal(s), "
                   f"largest disjoint family {max((len(c) for c in f.certificates), default=0)}")
        for p in f.petals:
            out.append(f"  {braces(s, p)}")
        data.append({"arrangement": list(f.base_arrangement), "petals": [pts(s, p) for p in f.petals],
                     "maximal_disjoint": [[pts(s, p) for p in c] for c in f.certificates],
                     "within_bound": f.within_bound})
    return "\n".join(out), {"flowers": data, "law_ok": bq.law_ok}


# ---------------------------------------------------------------- definability

def _yn(b):
    return "yes" if b else "no"


def orbit_table(s, rep):
    head = f"{rep.group} stabilizer of {braces(s, rep.base)} ({rep.normality_status.value} normality)"
    out = [head, f"{'element':<10} {'orbit':<24} dcl  dcl*          sdcl sdcl*         safe"]
    per = {}
    for p in s.points:
        v = rep.per_element[p]
        orb = braces(s, v.orbit)
        if len(orb) > 24:
            orb = orb[:22] + ".."
        out.append(f"{p:<10} {orb:<24} {_yn(v.in_dcl):<4} {v.in_dclstar:<13} {_yn(v.in_sdcl):<4} "
                   f"{v.in_sdclstar:<13} {_yn(v.safe)}")
        per[p] = {"orbit": pts(s, v.orbit), "dcl": v.in_dcl, "dclstar": v.in_dclstar, "sdcl": v.in_sdcl,
                  "sdclstar": v.in_sdclstar, "safe": v.safe}
    out.append(f"all orbits safe: {_yn(rep.all_safe)}; orbits off the zero stratum have dim >= 2: "
               f"{_yn(rep.dim_m_ok)}")
    data = {"group": rep.group, "base": list(rep.base), "normality": rep.normality_status.value,
            "orbits": [pts(s, o) for o in rep.orbits], "elements": per,
            "orbit_dims": [[pts(s, o), d] for o, d in sorted(rep.orbit_dims.items(),
                                                              key=lambda kv: pts(s, kv[0]))],
            "acl0": pts(s, rep.acl0), "all_safe": rep.all_safe, "dim_m_ok": rep.dim_m_ok}
    return "\n".join(out), data


def dclstar(s, res):
    t1, d1 = orbit_table(s, res.pointwise)
    t2, d2 = orbit_table(s, res.setwise)
    out = [f"dcl* trace: {braces(s, res.dclstar)}", f"sdcl* trace: {braces(s, res.sdclstar)}"]
    if res.undetermined_dclstar:
        out.append(f"dcl* undetermined: {braces(s, res.undetermined_dclstar)}")
    if res.undetermined_sdclstar:
        out.append(f"sdcl* undetermined: {braces(s, res.undetermined_sdclstar)}")
    for label, ok in res.checks:
        out.append(f"check {label}: {'pass' if ok else 'FAIL'}")
    out += ["", t1, "", t2]
    data = {"dclstar": pts(s, res.dclstar), "sdclstar": pts(s, res.sdclstar),
            "undetermined_dclstar": pts(s, res.undetermined_dclstar),
            "undetermined_sdclstar": pts(s, res.undetermined_sdclstar),
            "checks": [[label, ok] for label, ok in res.checks], "pointwise": d1, "setwise": d2}
    return "\n".join(out), data


def quasigroup(res):
    text = (f"{res.verdict}: line {{{','.join(res.line)}}} through {{{','.join(res.base)}}}\n"
            f"free points {{{','.join(res.free)}}}, orbit size {res.orbit_size}, "
            f"stabilizer order {res.group_order}, full symmetric action: {_yn(res.symmetric)}")
    data = {"verdict": res.verdict, "line": list(res.line), "base": list(res.base), "free": list(res.free),
            "orbit_size": res.orbit_size, "symmetric": res.symmetric, "group_order": res.group_order}
    return text, data


def fixture(rep):
    out = [f"fixture {rep.name}"]
    rows = []
    for label, source, ok, err in rep.rows:
        out.append(f"  {'PASS' if ok else 'FAIL'}  {label}  [{source}]" + (f"  {err}" if err else ""))
        rows.append({"label": label, "source": source, "ok": ok, "error": err})
    out.append(f"{sum(r[2] for r in rep.rows)}/{len(rep.rows)} checks pass")
    return "\n".join(out), {"fixture": rep.name, "ok": rep.ok, "checks": rows}


def selftest(results, fixture_reports, file_errors=()):
    out = []
    for r in results:
        out.append(f"{r.status:<5} {r.name}: {r.structures} structures, {r.instances} instances, "
                   f"{len(r.violations)} violation(s)")
        if r.known_false:
            out.append(f"      known counterexample: {r.known_false}")
    for rep in fixture_reports:
        bad = [x for x in rep.rows if not x[2]]
        out.append(f"{'PASS' if rep.ok else 'FAIL':<5} fixture {rep.name}: {len(rep.rows) - len(bad)}/{len(rep.rows)}")
        for label, _, _, err in bad:
            out.append(f"      {label} {err}".rstrip())
    for e in file_errors:
        out.append(f"FAIL  {e}")
    ok = all(r.as_expected for r in results) and all(r.ok for r in fixture_reports) and not file_errors
    out.append("selftest: " + ("all pass" if ok else "FAILURES"))
    data = {"ok": ok,
            "properties": [{"name": r.name, "status": r.status, "structures": r.structures,
                            "instances": r.instances, "violations": len(r.violations),
                            "known_false": r.known_false} for r in results],
            "fixtures": {rep.name: rep.ok for rep in fixture_reports},
            "file_errors": list(file_errors)}
    return "\n".join(out), data, ok
