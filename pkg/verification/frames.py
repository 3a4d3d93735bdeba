"""Orthonormality and Parseval checks for the lattice systems."""

import logging

import numpy as np

from functions.evaluators import demote
from functions.inner import inner_product_quadrature
from groups.actions import act
from groups.cases import Q_CASE, lattice_element, to_q_parameters
from intertwiners.operators import apply_U, apply_U_inv, apply_U_J, apply_U_J_inv

from .reports import VerificationReport
from .systems import exact_gram, l_element, l_side_function, parseval_sum, q_element, tail_matrix
from .utils import max_defect, ordered_map, rng_for

logger = logging.getLogger("verification")


def _spot_pairs(indices, count, rng):
    same_scale = [(i, j) for i, a in enumerate(indices) for j, b in enumerate(indices) if i <= j and a[0] == b[0]]
    if count >= len(same_scale):
        return same_scale
    chosen = rng.choice(len(same_scale), size=count, replace=False)
    return [same_scale[c] for c in sorted(chosen)]


def _j_side_transfers(case, lift, indices, N, q_evals):
    """U^J mu^J_lambda psi^J_N, each restricted to the support of its q-side counterpart."""
    psi_J = apply_U_J_inv(case, demote(apply_U(lift.partial_sum(N))))
    out = []
    for (k, m), q_eval in zip(indices, q_evals):
        moved = apply_U_J(case, act(case, lattice_element(case, k, m), psi_J))
        out.append(moved.with_rule(moved.rule, support=q_eval.support, breaks=q_eval.breaks, freq_hint=q_eval.freq_hint))
    return out


def gram_defect(params: dict, seed: int) -> VerificationReport:
    """
    max |Gram - I| over a lattice box. The l-side Gram is exact on S_N plus
    the closed-form band tail; q- and J-side Grams are transferred to the
    l-side through U^-1 and spot-checked by quadrature on the Q-side.
    """
    rep, lift, box, tol = params["rep"], params["lift"], params["box"], params["tol"]
    case = params.get("case")
    N = box.fiber_n
    indices = box.indices()
    l_elements = [l_element(lift, k, m, N) for k, m in indices]
    exact_l = exact_gram(l_elements)
    tail = tail_matrix(lift, indices, N)
    identity = np.eye(len(indices))
    details = {"elements": len(indices)}

    if rep == "l":
        gram = exact_l + tail
        defect = max_defect(np.abs(gram - identity).ravel())
    else:
        q_elements = [q_element(lift, k, m, N) for k, m in indices]
        exact_q = exact_gram([apply_U_inv(e) for e in q_elements])
        gram = exact_q + tail
        transfer = max_defect(np.abs(exact_q - exact_l).ravel())
        defect = max(max_defect(np.abs(gram - identity).ravel()), transfer)
        details["transferDeviation"] = transfer

        q_evals = [demote(e) for e in q_elements]
        if rep == "J":
            lattice_gap = max_defect(
                max(abs(g.u - h.u), abs(g.t - h.t))
                for g, h in (
                    (to_q_parameters(case, lattice_element(case, k, m)), lattice_element(Q_CASE, k, m))
                    for k, m in indices
                )
            )
            details["latticeMismatch"] = lattice_gap
            defect = max(defect, lattice_gap)
            sides = _j_side_transfers(case, lift, indices, N, q_evals)
        else:
            sides = q_evals

        spot_tol = params["spotTol"]
        pairs = _spot_pairs(indices, params["spotChecks"], rng_for(seed, "gram", rep, case.label if case else ""))

        def spot(pair):
            i, j = pair
            value, _ = inner_product_quadrature(sides[i], sides[j], tol=0.1 * spot_tol)
            return abs(value - exact_q[i, j])

        spot_dev = max_defect(ordered_map(spot, pairs))
        details["spotChecks"] = len(pairs)
        details["spotDeviation"] = spot_dev
        details["spotTolerance"] = spot_tol
        if spot_dev > spot_tol:
            logger.warning("gram %s: quadrature spot checks deviate by %.3e", rep, spot_dev)
            defect = max(defect, spot_dev)

    resolution = float(np.finfo(float).eps)
    if tol < resolution:
        logger.warning("gram %s: tolerance %.1e is below double precision (%.1e)", rep, tol, resolution)
    label = case.label if case is not None else ("L" if rep == "l" else "Q")
    return VerificationReport(
        check="gram",
        case=label,
        params={"rep": rep, "generator": lift.bijection.name, **box.as_dict()},
        maxDefect=defect,
        tolerance=tol,
        samples=len(indices) ** 2,
        notes="S_N exact inner products plus closed-form band tail",
        resolution=resolution,
        extra=details,
    )


def parseval_defect(params: dict, seed: int) -> VerificationReport:
    """| ||f||^2 - sum over the box of |<f, mu_lambda psi>|^2 |."""
    rep, lift, box, tol = params["rep"], params["lift"], params["box"], params["tol"]
    f = l_side_function(params["function"], rep)
    norm2, total, per_scale = parseval_sum(f, lift, box, tol, allow_partial=params["allowPartial"])
    mode = "closed-form m-sum per scale" if box.m is None else "explicit m box"
    return VerificationReport(
        check="parseval",
        case="L" if rep == "l" else "Q",
        params={"rep": rep, "generator": lift.bijection.name, **box.as_dict()},
        maxDefect=abs(norm2 - total),
        tolerance=tol,
        samples=len(per_scale),
        notes=mode,
        extra={"norm2": norm2, "coefficientEnergy": total, "perScale": {str(k): v for k, v in per_scale.items()}},
    )
