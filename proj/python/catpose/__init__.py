"""Category-level 6D pose and size estimation toolkit."""

import json as _json

from ._catpose import (
    CatposeError,
    DegenerateConfiguration,
    FitFailure,
    InvalidInput,
    ParseError,
    PoseFitResult,
    SimilarityTransform,
    _evaluate_files,
    builtin_prior,
    canonicalize_nocs_labels,
    chamfer_distance,
    map_rotation,
    nocs_normalize,
    oriented_iou,
    ransac_fit,
    smooth_l1,
    symmetry_table,
    total_loss,
    umeyama,
    y_rotation,
)


def evaluate(gt_path, pred_path, threads=1):
    """mAP report for a ground-truth and a prediction split file, as a dict."""
    return _json.loads(_evaluate_files(str(gt_path), str(pred_path), threads))


__all__ = [name for name in dir() if not name.startswith("_")]
