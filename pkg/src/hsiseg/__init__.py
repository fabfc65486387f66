"""Interactive click-driven segmentation toolkit for hyperspectral images."""

from .backends import (
    FusionInput,
    RemoteBackend,
    RemoteBackendError,
    RemoteProtocolError,
    RemoteStatusError,
    RemoteTimeoutError,
    RemoteTransportError,
    ScfBackend,
    SegmentationBackend,
    backend_from_name,
    build_fusion_input,
    remote_backend,
    scf_backend,
)
from .cube import BandTriple, HyperCube, LabelMap, PseudoRgb, pseudo_rgb, spectrum_at
from .envi import EnviFormatError, load_envi, load_labels, write_cube, write_envi, write_labels
from .evaluation import (
    EvalConfig,
    EvalReport,
    StepRecord,
    TaskResult,
    dice,
    dice_at_max,
    dice_at_max_grid,
    dice_f1_check,
    evaluate_dataset,
    next_click,
    simulate_session,
)
from .imgproc import (
    ComponentLabeling,
    connected_components,
    distance_transform,
    distance_transform_squared,
    histogram_equalize,
    largest_component_center,
    resize_bilinear,
)
from .losses import LossBreakdown, bce_loss, combined_loss, session_mean_loss, soft_dice_loss
from .phantom import PhantomSpec, generate, material_spectra
from .spectral import ClickSet, ScfKind, pcc, scf_map, spectral_angle

__version__ = "0.1.0"

__all__ = [
    "BandTriple",
    "ClickSet",
    "ComponentLabeling",
    "EnviFormatError",
    "EvalConfig",
    "EvalReport",
    "FusionInput",
    "HyperCube",
    "LabelMap",
    "LossBreakdown",
    "PhantomSpec",
    "PseudoRgb",
    "RemoteBackend",
    "RemoteBackendError",
    "RemoteProtocolError",
    "RemoteStatusError",
    "RemoteTimeoutError",
    "RemoteTransportError",
    "ScfBackend",
    "ScfKind",
    "SegmentationBackend",
    "StepRecord",
    "TaskResult",
    "backend_from_name",
    "bce_loss",
    "build_fusion_input",
    "combined_loss",
    "connected_components",
    "dice",
    "dice_at_max",
    "dice_at_max_grid",
    "dice_f1_check",
    "distance_transform",
    "distance_transform_squared",
    "evaluate_dataset",
    "generate",
    "histogram_equalize",
    "largest_component_center",
    "load_envi",
    "load_labels",
    "material_spectra",
    "next_click",
    "pcc",
    "pseudo_rgb",
    "remote_backend",
    "resize_bilinear",
    "scf_backend",
    "scf_map",
    "session_mean_loss",
    "simulate_session",
    "soft_dice_loss",
    "spectral_angle",
    "spectrum_at",
    "write_cube",
    "write_envi",
    "write_labels",
]
