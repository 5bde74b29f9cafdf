"""Deterministic generator for the bundled surrogate CKD dataset.

The real UCI chronic kidney disease file cannot be fetched in every
deployment environment, so the package ships a synthetic stand-in with
the same schema, class balance (250 ckd / 150 notckd) and per-column
missingness profile.  Clinical plausibility is approximated with
class-conditional distributions tied to a latent severity score, and
missing cells are masked completely at random with a per-row propensity
so that a sizable block of fully complete rows survives.

Run as a module to regenerate the CSV in place:

    python3 -m nephro_xai.data.generate
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from nephro_xai.data import TARGET_COLUMN, load_ckd_schema
from nephro_xai.tabular import DataTable, parse_dataset, serialize_dataset

SEED = 20240400
N_CKD = 250
N_NOTCKD = 150

#: per-column missing-cell percentages mirrored from the source data
MISSING_PCT = {
    "age": 2.23, "bp": 2.98, "sg": 11.70, "al": 11.44, "su": 12.18,
    "rbc": 37.81, "pc": 16.16, "pcc": 0.99, "ba": 0.99, "bgr": 10.94,
    "bu": 4.72, "sc": 4.22, "sod": 21.64, "pot": 21.89, "hemo": 12.93,
    "pcv": 17.66, "wbcc": 26.36, "rbcc": 32.58, "htn": 0.50, "dm": 0.50,
    "cad": 0.50, "appet": 0.24, "pe": 0.24, "ane": 0.24,
}

SG_LEVELS = (1.005, 1.010, 1.015, 1.020, 1.025)


def _ckd_rows(rng: np.random.Generator) -> list[dict]:
    rows = []
    for _ in range(N_CKD):
        v = rng.beta(2.0, 2.0)  # latent severity in (0, 1)
        htn = rng.random() < 0.30 + 0.45 * v
        dm = rng.random() < 0.25 + 0.35 * v
        hemo = np.clip(rng.normal(12.2 - 3.0 * v, 1.3), 3.1, 17.8)
        sc = np.clip(np.exp(rng.normal(0.25 + 1.5 * v, 0.35)), 0.6, 60.0)
        pc_abn = rng.random() < 0.12 + 0.45 * v
        row = {
            "age": round(float(np.clip(rng.normal(54 + 9 * v, 15), 3, 90))),
            "bp": round(float(np.clip(rng.normal(77 + 9 * v, 11), 50, 120)) / 10) * 10,
            "sg": SG_LEVELS[rng.choice(5, p=[0.15, 0.30, 0.28, 0.18, 0.09])],
            "al": int(min(5, rng.binomial(5, 0.12 + 0.55 * v))),
            "su": int(rng.binomial(5, 0.38 if dm else 0.06)),
            "rbc": "abnormal" if rng.random() < 0.10 + 0.50 * v else "normal",
            "pc": "abnormal" if pc_abn else "normal",
            "pcc": "present" if rng.random() < (0.30 if pc_abn else 0.04) else "notpresent",
            "ba": "present" if rng.random() < 0.04 + 0.12 * v else "notpresent",
            "bgr": round(float(np.clip(
                rng.normal(215, 65) if dm else rng.normal(132, 38), 70, 490))),
            "bu": round(float(np.clip(17 * sc + rng.normal(12, 13), 10, 391))),
            "sc": round(float(sc), 1),
            "sod": round(float(np.clip(rng.normal(138 - 4.5 * v, 5.5), 104, 150))),
            "pot": round(float(np.clip(
                rng.normal(4.4 + 1.2 * v, 0.8) + (rng.random() < 0.03) * rng.uniform(5, 35),
                2.5, 47.0)), 1),
            "hemo": round(float(hemo), 1),
            "pcv": round(float(np.clip(3.05 * hemo + rng.normal(0, 1.8), 9, 54))),
            "wbcc": round(float(np.clip(rng.normal(8700 + 2100 * v, 2600), 2200, 26400)) / 100) * 100,
            "rbcc": round(float(np.clip(0.33 * hemo + rng.normal(0, 0.45), 2.1, 8.0)), 1),
            "htn": "yes" if htn else "no",
            "dm": "yes" if dm else "no",
            "cad": "yes" if rng.random() < 0.08 + 0.15 * v else "no",
            "appet": "poor" if rng.random() < 0.15 + 0.40 * v else "good",
            "pe": "yes" if rng.random() < 0.10 + 0.35 * v else "no",
            "ane": "yes" if rng.random() < (0.50 if hemo < 11 else 0.06) else "no",
            "class": "ckd",
        }
        rows.append(row)
    return rows


def _notckd_rows(rng: np.random.Generator) -> list[dict]:
    rows = []
    for _ in range(N_NOTCKD):
        hemo = np.clip(rng.normal(14.9, 1.3), 10.8, 18.5)
        row = {
            "age": round(float(np.clip(rng.normal(46, 16), 12, 85))),
            "bp": round(float(np.clip(rng.normal(72, 8.5), 50, 100)) / 10) * 10,
            "sg": SG_LEVELS[rng.choice(5, p=[0.0, 0.03, 0.07, 0.46, 0.44])],
            "al": int(rng.choice(3, p=[0.90, 0.08, 0.02])),
            "su": int(rng.choice(2, p=[0.97, 0.03])),
            "rbc": "abnormal" if rng.random() < 0.02 else "normal",
            "pc": "abnormal" if rng.random() < 0.03 else "normal",
            "pcc": "present" if rng.random() < 0.01 else "notpresent",
            "ba": "present" if rng.random() < 0.01 else "notpresent",
            "bgr": round(float(np.clip(rng.normal(107, 17), 70, 160))),
            "bu": round(float(np.clip(rng.normal(33, 9), 10, 60))),
            "sc": round(float(np.clip(rng.normal(0.9, 0.22), 0.4, 1.4)), 1),
            "sod": round(float(np.clip(rng.normal(141, 3.5), 130, 150))),
            "pot": round(float(np.clip(rng.normal(4.4, 0.55), 2.8, 6.0)), 1),
            "hemo": round(float(hemo), 1),
            "pcv": round(float(np.clip(3.05 * hemo + rng.normal(0, 1.6), 30, 54))),
            "wbcc": round(float(np.clip(rng.normal(7600, 1700), 3500, 12500)) / 100) * 100,
            "rbcc": round(float(np.clip(0.33 * hemo + rng.normal(0, 0.40), 3.5, 8.0)), 1),
            "htn": "yes" if rng.random() < 0.03 else "no",
            "dm": "yes" if rng.random() < 0.02 else "no",
            "cad": "no",
            "appet": "poor" if rng.random() < 0.01 else "good",
            "pe": "yes" if rng.random() < 0.01 else "no",
            "ane": "yes" if rng.random() < 0.01 else "no",
            "class": "notckd",
        }
        rows.append(row)
    return rows


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def generate_rows(seed: int = SEED) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = _ckd_rows(rng) + _notckd_rows(rng)
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def mask_missing(rows: list[dict], seed: int = SEED) -> list[dict]:
    """Mask cells per MISSING_PCT, weighting row choice by a per-row
    propensity so complete rows concentrate instead of vanishing.  The
    mask never looks at cell values, keeping the mechanism MCAR."""
    rng = np.random.default_rng(seed + 1)
    n = len(rows)
    propensity = np.exp(4.5 * rng.random(n))
    out = [dict(r) for r in rows]
    for col, pct in MISSING_PCT.items():
        n_missing = int(round(pct / 100 * n))
        if n_missing == 0:
            continue
        p = propensity / propensity.sum()
        chosen = rng.choice(n, size=n_missing, replace=False, p=p)
        for i in chosen:
            out[i][col] = "?"
    return out


def rows_to_csv(rows: list[dict]) -> str:
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format(row[c]) for c in header))
    return "\n".join(lines) + "\n"


def generate_csv(seed: int = SEED) -> str:
    return rows_to_csv(mask_missing(generate_rows(seed), seed))


def load_surrogate(text: str | None = None) -> DataTable:
    if text is None:
        from nephro_xai.data import surrogate_csv_text

        text = surrogate_csv_text()
    return parse_dataset(io.StringIO(text), load_ckd_schema(), TARGET_COLUMN)


def main() -> None:
    text = generate_csv()
    path = Path(__file__).with_name("ckd_surrogate.csv")
    path.write_text(text)
    table = load_surrogate(text)
    # canonical round trip must be stable
    assert serialize_dataset(table) == serialize_dataset(parse_dataset(
        io.StringIO(serialize_dataset(table)), load_ckd_schema(), TARGET_COLUMN))
    complete = int(table.complete_row_mask().sum())
    print(f"wrote {path} rows={table.n_rows} complete={complete} "
          f"classes={table.class_counts()}")


if __name__ == "__main__":
    main()
