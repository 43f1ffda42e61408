"""CSV and JSON artifact writers with reproducible formatting.

Floats are rendered with 17 significant digits, lines end with LF, and no
wall-clock content reaches the CSVs, so identical configurations produce
bit-identical files.
"""

import json

import numpy as np

__all__ = [
    "fmt",
    "diagnostics_csv",
    "spectrum_csv",
    "w_trajectory_csv",
    "reduced_trajectory_csv",
    "stable_trajectory_csv",
    "write_text",
    "write_json",
]


def fmt(x) -> str:
    return format(float(x), ".17g")


def diagnostics_csv(series) -> str:
    cols = ["t", "l2_sq", "momentum", "u0_abs"]
    exps = sorted(series.hs_sq)
    cols += [f"hs_sq_{s:.2f}" for s in exps]
    lines = [",".join(cols)]
    for i in range(len(series)):
        row = [series.t[i], series.l2_sq[i], series.momentum[i], series.u0_abs[i]]
        row += [series.hs_sq[s][i] for s in exps]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def spectrum_csv(spec) -> str:
    lines = ["index,eigenvalue,multiplicity"]
    for i, (val, mult) in enumerate(zip(spec.distinct_eigenvalues, spec.multiplicities), start=1):
        lines.append(f"{i},{fmt(val)},{int(mult)}")
    return "\n".join(lines) + "\n"


def w_trajectory_csv(traj) -> str:
    lines = ["t,re_b,im_b,re_c,im_c,re_p,im_p,beta,gamma,momentum"]
    beta, gamma = traj.beta, traj.gamma
    for i in range(traj.t.shape[0]):
        row = [
            traj.t[i],
            traj.b[i].real, traj.b[i].imag,
            traj.c[i].real, traj.c[i].imag,
            traj.p[i].real, traj.p[i].imag,
            beta[i], gamma[i], traj.momentum[i],
        ]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def reduced_trajectory_csv(traj) -> str:
    lines = ["t,beta,gamma,re_zeta,im_zeta"]
    for i in range(traj.t.shape[0]):
        row = [traj.t[i], traj.beta[i], traj.gamma[i], traj.zeta[i].real, traj.zeta[i].imag]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def stable_trajectory_csv(result) -> str:
    lines = ["t,beta,delta,re_zeta,im_zeta"]
    for i in range(result.t.shape[0]):
        row = [result.t[i], result.beta[i], result.delta[i],
               result.zeta[i].real, result.zeta[i].imag]
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonify(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
