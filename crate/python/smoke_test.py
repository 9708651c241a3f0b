"""Smoke test for the compiled `laug` extension module.

Build and install it first, e.g.

    maturin develop -m crates/python/Cargo.toml

then run `python python/smoke_test.py`.
"""

import json

import laug


def main():
    assert abs(laug.fuzzy_ratio("lester", "leicester") - 0.8) < 1e-12
    assert laug.number_to_spoken("13:45") == "thirteen forty five"

    fixture = laug.fixture_json()
    aug = laug.Augmenter(seed=42)

    for method in ("wp", "tp", "sr", "sd"):
        records = json.loads(aug.augment(fixture, method, "test"))
        rates = laug.change_rates(fixture, json.dumps(records))
        print(f"{method}: {len(records)} records, word change {rates['word_rate']:.3f}, slot change {rates['slot_rate']:.3f}")

    out = aug.augment_text(
        "I want to go to Cambridge.",
        [("attraction", "inform", "dest", "Cambridge")],
        "sd",
    )
    print("sd:", out["text"])

    composed = json.loads(laug.Augmenter(seed=7).compose(fixture))
    again = json.loads(laug.Augmenter(seed=7).compose(fixture))
    assert composed == again
    added = sum(1 for d in composed["dialogs"] if d.get("augmented_from"))
    print(f"compose: {added} augmented dialogs")

    scores = aug.baseline(fixture)
    print("baseline F1:", {k: round(100 * v, 1) for k, v in scores.items()})
    assert all(scores[m] < scores["Ori."] for m in ("WP", "TP", "SR", "SD"))
    print("ok")


if __name__ == "__main__":
    main()
