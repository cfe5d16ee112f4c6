"""End-to-end computations returning JSON-ready report sections."""

from __future__ import annotations

import sys

import numpy as np

from . import __version__
from .classalg import check_tensor, centre_mod_p, dump_constants, structure_constants
from .commalg import LoewyProfile, block_decompose, corner_algebra, loewy_profile
from .gfq import make_field_ctx, poly_str, special_elements
from .kernels import default_backend
from .truncpoly import distinguishable, predicted_tensor_profile, tensor_truncated
from .unitary import (DEFAULT_BUDGET, build_normalizer, build_psu, build_sylow,
                      check_quadric_action, conjugacy_classes, normalizer_order, psu_order,
                      trivial_intersection)
from . import zkncf


def closed_profile(q: int) -> tuple:
    d, j1, j2 = zkncf.loewy_closed(q)
    return (d, j1) + ((j2,) if j2 else ()) + (0,)


def metadata_versions() -> dict:
    return {"psucentre": __version__, "numpy": np.__version__}


def metadata(F) -> dict:
    sp = special_elements(F)
    return {
        "q": F.q, "p": F.p, "r": F.r, "gamma": F.gamma,
        "field_order": F.order,
        "field_polynomial": poly_str(F.poly),
        "field_polynomial_coeffs": list(F.poly),
        "generator": F.gen,
        "omega": sp.omega, "tau": sp.tau,
        "element_encoding": "base-p digits of the coefficient vector over F_p (constant term least significant)",
        "versions": metadata_versions(),
        "backend": default_backend(),
    }


def field_info(F) -> dict:
    from .gfq import Cosets, coset_labels
    sizes = {c.name: len(coset_labels(F, c)) for c in Cosets}
    info = F.describe()
    info["coset_counts"] = sizes
    return info


class Progress:
    """Carriage-return progress line on stderr."""

    def __init__(self, label: str, enabled: bool):
        self.label = label
        self.enabled = enabled

    def __call__(self, k, n):
        if self.enabled:
            sys.stderr.write(f"\r{self.label}: {k + 1}/{n}   ")
            sys.stderr.flush()

    def done(self):
        if self.enabled:
            sys.stderr.write("\n")


def _group_section(H, cd) -> dict:
    return {
        "name": H.name,
        "order": H.order,
        "n_classes": int(cd.n_classes),
        "class_sizes": [int(s) for s in cd.sizes],
        "inverse_class": [int(i) for i in cd.inverse_class],
        "representatives": [r.rows() for r in cd.reps],
    }


def _tensor_checks(st) -> dict:
    return {f"tensor_{k}": v for k, v in check_tensor(st).items()}


def analyze_n(F, threads=None, dump=None, progress=False) -> tuple[dict, dict]:
    """Sections for N and Z(F_p N); returns (report sections, objects)."""
    N = build_normalizer(F)
    cd = conjugacy_classes(N)
    pr = Progress(f"Z(kN) q={F.q}", progress)
    st = structure_constants(N, cd, threads=threads, progress=pr)
    pr.done()
    checks = _tensor_checks(st)
    A = centre_mod_p(st, F.p)
    A.check()
    prof = loewy_profile(A)
    model_sizes = sorted(int(zkncf.class_size(F.q, lab)) for lab in zkncf.reps(F.q))
    checks.update({
        "normalizer_order": N.order == normalizer_order(F.q),
        "normalizer_class_count": cd.n_classes == zkncf.n_classes(F.q),
        "normalizer_class_sizes": sorted(int(s) for s in cd.sizes) == model_sizes,
        "normalizer_profile_matches_closed_form": prof.dims == closed_profile(F.q),
    })
    if dump:
        dump_constants(st, dump)
    group = _group_section(N, cd)
    group["sylow_order"] = F.q ** 3
    centre = {"dim": A.dim, "loewy_profile": list(prof.dims), "tensor_checksum": st.checksum(),
              "expected_profile": list(closed_profile(F.q))}
    return {"normalizer": group, "centre_n": centre, "checks": checks}, {"N": N, "cd": cd, "st": st, "A": A,
                                                                           "profile": prof}


def analyze_g(F, threads=None, dump=None, budget=DEFAULT_BUDGET, progress=False, seed=0) -> tuple[dict, dict]:
    """Sections for G = PSU(3, q), Z(F_p G), its blocks and principal block."""
    G = build_psu(F, budget=budget)
    N = build_normalizer(F)
    S = build_sylow(F)
    quad = check_quadric_action(G, N)
    ti = trivial_intersection(G, S, samples=None if F.q <= 3 else 64, seed=seed)
    cd = conjugacy_classes(G)
    pr = Progress(f"Z(kG) q={F.q}", progress)
    st = structure_constants(G, cd, threads=threads, progress=pr)
    pr.done()
    checks = _tensor_checks(st)
    A = centre_mod_p(st, F.p)
    A.check()
    prof = loewy_profile(A)
    bd = block_decompose(A)
    blocks = []
    for i, e in enumerate(bd.idempotents):
        C = corner_algebra(A, e)
        bp = loewy_profile(C)
        blocks.append({"index": i, "dim": C.dim, "loewy_profile": list(bp.dims),
                       "principal": i == bd.principal_index,
                       "support": [int(k) for k in np.flatnonzero(e)]})
    principal = blocks[bd.principal_index]
    checks.update({
        "psu_order": G.order == psu_order(F.q),
        "quadric_size": quad["points"] == F.q ** 3 + 1,
        "doubly_transitive": quad["doubly_transitive"],
        "normalizer_is_point_stabilizer": quad["normalizer_is_stabilizer"],
        "trivial_intersection": ti,
        "blocks_sum_to_centre": sum(b["dim"] for b in blocks) == A.dim,
    })
    if dump:
        dump_constants(st, dump)
    group = _group_section(G, cd)
    group["quadric"] = quad
    centre = {"dim": A.dim, "loewy_profile": list(prof.dims), "n_blocks": bd.n_blocks, "blocks": blocks,
              "principal_profile": principal["loewy_profile"], "tensor_checksum": st.checksum()}
    return {"group": group, "centre_g": centre, "checks": checks}, {"G": G, "cd": cd, "st": st, "A": A,
                                                                     "bd": bd,
                                                                     "principal": corner_algebra(
                                                                         A, bd.idempotents[bd.principal_index])}


def closed_form(q: int, p: int | None = None, csv_path=None, F=None) -> dict:
    pp, r = zkncf.prime_power(q)
    p = p or pp
    if q % p:
        raise ValueError(f"p = {p} does not divide q = {q}")
    model = zkncf.mult_table(q)
    small = model.dim <= zkncf.MAX_DENSE
    checks = zkncf.check_model(model, associativity=q <= 16)
    sec = {
        "q": q, "p": p, "gamma": model.gamma, "n_labels": model.dim,
        "labels": [str(l) for l in model.labels] if small else None,
        "class_sizes": [int(s) for s in model.sizes] if small else None,
        "group_order": int(model.sizes.sum()),
        "table_nnz": int(len(model.entries[0])),
        "table_checksum": model.checksum(),
        "loewy_closed": list(zkncf.loewy_closed(q)),
    }
    if model.gamma == 3:
        sec["lmn"] = list(zkncf.lmn(q))
        sec["noncube_log"] = model.noncube_log
        if F is None and q * q <= 1 << 16:
            F = make_field_ctx(pp, r)
        if F is not None:
            bf = list(zkncf.lmn_bruteforce(F))
            sec["lmn_bruteforce"] = bf
            checks["lmn_formula_matches_count"] = bf == sec["lmn"]
            l, m, n = sec["lmn"]
            checks["lmn_augmentation_identity"] = (q * q - 1) // 3 == 1 + l + 2 * m and n == l + 1
    if small:
        prof = loewy_profile(model.algebra(p))
        sec["loewy_computed"] = list(prof.dims)
        checks["loewy_closed_matches_computed"] = prof.dims == closed_profile(q)
        pres = zkncf.presentation(q, p, model=model)
        sec["presentation"] = {
            "generators": pres["generators"],
            "n_relations": len(pres["relations"]),
            "failed_relations": [r["relation"] for r in pres["relations"] if not r["vanishes"]],
            "normal_monomials": pres["normal_monomials"],
            "rank_of_images": pres["rank_of_images"],
            "verified": pres["verified"],
        }
        checks["presentation_verified"] = pres["verified"]
    if csv_path:
        import csv
        with open(csv_path, "w", newline="") as fh:
            for i, lab in enumerate(model.labels):
                fh.write(f"# label {i}: {lab} size={int(model.sizes[i])}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "j", "k", "m"])
            for row in zip(*model.entries):
                w.writerow([int(x) for x in row])
    return {"closed_form": sec, "checks": {f"closed_form_{k}": v for k, v in checks.items()}}


def crosscheck(F, threads=None) -> dict:
    rep = zkncf.crosscheck(F, threads=threads)
    return {"crosscheck": rep, "checks": {"crosscheck_match": rep["match"],
                                           "psi_cube_fact": zkncf.psi_cube_fact(F)}}


def tensor_section(F, prof_B: LoewyProfile, prof_b: LoewyProfile, B=None, b=None) -> dict:
    p = F.p
    sec = {"p": p, "principal_block_profile": list(prof_B.dims), "brauer_correspondent_profile": list(prof_b.dims),
           "predicted_B": list(predicted_tensor_profile(prof_B, p)),
           "predicted_b": list(predicted_tensor_profile(prof_b, p)),
           "distinguishable": distinguishable(prof_B, prof_b, p)}
    checks = {}
    for name, alg, prof in (("B", B, prof_B), ("b", b, prof_b)):
        if alg is None:
            continue
        tp = loewy_profile(tensor_truncated(alg, p))
        sec[f"tensor_profile_{name}"] = list(tp.dims)
        checks[f"tensor_prediction_{name}"] = [tp.loewy_length, tp.top_dim] == sec[f"predicted_{name}"]
    return {"tensor": sec, "checks": checks}
