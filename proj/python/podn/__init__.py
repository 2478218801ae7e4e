"""Open-set recognition with learned prototypes and triplet thresholds."""

try:
    # installed wheel layout: podn/_podn.*.so
    from ._podn import (  # noqa: F401
        ExpandableNet,
        PrototypeBank,
        ThresholdSet,
        calibrate,
        collect_calibration_rows,
        decide,
        distance_scores,
        distance_weight_init,
        generate_synthetic,
        mean_normalized_alpha,
        run_experiment_json,
        softmax_rows,
        train_initial,
    )
except ImportError:
    # in-tree builds put the extension on sys.path instead
    from _podn import (  # noqa: F401
        ExpandableNet,
        PrototypeBank,
        ThresholdSet,
        calibrate,
        collect_calibration_rows,
        decide,
        distance_scores,
        distance_weight_init,
        generate_synthetic,
        mean_normalized_alpha,
        run_experiment_json,
        softmax_rows,
        train_initial,
    )

__all__ = [
    "ExpandableNet",
    "PrototypeBank",
    "ThresholdSet",
    "calibrate",
    "collect_calibration_rows",
    "decide",
    "distance_scores",
    "distance_weight_init",
    "generate_synthetic",
    "mean_normalized_alpha",
    "run_experiment_json",
    "softmax_rows",
    "train_initial",
]
