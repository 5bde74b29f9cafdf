"""One patient, fully explained.

Trains the default model if needed, then walks through the local
explanations for a single row: prediction, LIME conditions, Shapley
attributions, and the counterfactual table in raw units.
"""

import json
from pathlib import Path

from nephro_xai import pipeline

OUT = Path(__file__).parent / "demo_out"
ROW = 0


def main() -> None:
    config = pipeline.load_config(out=str(OUT), seed=0)
    if not (OUT / pipeline.MODEL_ARTIFACT).is_file():
        print("no trained model yet; running impute + train ...")
        pipeline.run_impute(config)
        pipeline.run_train(config)

    model_doc = pipeline.read_json(OUT / pipeline.MODEL_ARTIFACT)
    class_labels = model_doc["target"]["categories"]

    doc = pipeline.run_explain(config, row=ROW)
    predicted = class_labels[doc["lime"]["predicted_class"]]
    print(f"row {ROW}: predicted {predicted} "
          f"(p={doc['lime']['probability']:.3f})\n")

    print("LIME conditions (signed local weights):")
    for cond in doc["lime"]["conditions"]:
        print(f"  {cond['weight']:+.4f}  {cond['condition']}")

    print("\nShapley attributions (sum to prediction minus base):")
    pairs = sorted(
        zip(doc["shapley"]["feature_names"], doc["shapley"]["phi"]),
        key=lambda t: -abs(t[1]),
    )
    for name, phi in pairs:
        print(f"  {name:6s} {phi:+.4f}")
    print(f"  base value {doc['shapley']['base_value']:.4f}")

    cf = pipeline.run_counterfactual(config, row=ROW)
    target = class_labels[cf["result"]["target_class"]]
    print(f"\ncounterfactuals toward class {target} (raw units):")
    for record, entry in zip(
        cf["counterfactual_units"], cf["result"]["counterfactuals"]
    ):
        changes = []
        for name in entry["changed"]:
            value = record[name]
            shown = f"{value:.2f}" if isinstance(value, float) else str(value)
            changes.append(f"{name} -> {shown}")
        print("  change " + ", ".join(changes))


if __name__ == "__main__":
    main()
