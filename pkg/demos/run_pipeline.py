"""End-to-end batch pipeline on the bundled dataset.

Runs every stage in order into ./demo_out and narrates the headline
numbers from each report.
"""

import json
from pathlib import Path

from nephro_xai import pipeline

OUT = Path(__file__).parent / "demo_out"


def main() -> None:
    config = pipeline.load_config(out=str(OUT), seed=0)
    print(f"running all stages into {OUT} ...")
    artifacts = pipeline.run_all(config)
    print(f"wrote {len(artifacts)} reports + {pipeline.MODEL_ARTIFACT}\n")

    profile = json.loads((OUT / "profile.json").read_text())
    worst = max(profile["features"], key=lambda f: f["fraction"])
    print(f"most missing feature: {worst['feature']} ({worst['percent_display']}%)")

    mcar = json.loads((OUT / "mcar.json").read_text())
    print(
        f"Little's MCAR test: chi2={mcar['statistic']:.1f} "
        f"df={mcar['degrees_of_freedom']} p={mcar['p_value']:.3g}"
    )

    selection = json.loads((OUT / "selection.json").read_text())
    print("consensus features:", ", ".join(sorted(selection["report"]["consensus"])))
    print("final features:    ", ", ".join(selection["report"]["final"]))

    evaluation = json.loads((OUT / "evaluation.json").read_text())
    print("\n10-fold CV on the balanced set:")
    for family, entry in evaluation["families"].items():
        r = entry["report"]
        print(f"  {family:4s} accuracy={r['accuracy']:.3f} f1={r['f1']:.3f}")
    print(f"shipped model: {evaluation['chosen_model']}")

    metrics = json.loads((OUT / "metrics.json").read_text())
    print("\ninterpretability scorecard (I, F1, FII, FAcc):")
    for row in metrics["scorecard"]:
        print(
            f"  {row['model']:4s} {row['interpretability']:.2f} "
            f"{row['fidelity_f1']:.2f} {row['fii']:.2f} {row['facc']:.2f}"
        )


if __name__ == "__main__":
    main()
