"""microsim: wave-optics microscope image simulation and sim-to-real dataset tooling."""

from .align import (
    BalancedBins,
    FocusSeries,
    PairManifest,
    PairRecord,
    build_pairs,
    find_focal_peak,
    log_response,
    make_focus_series,
    read_pair_manifest,
    segment_and_balance,
    write_pair_manifest,
)
from .config import OpticalConfig, load_optical_config, save_optical_config
from .dataset import (
    DatasetManifest,
    ManifestEntry,
    PoseLabel,
    PoseSplitSpec,
    default_class_set,
    load_class_set,
    make_pose_split,
    parse_pose,
    read_dataset_manifest,
    split_manifest,
    write_dataset_manifest,
)
from .errors import AlignmentError, DegenerateInputError, DimensionError, PoseError
from .metrics import MetricReport, evaluate_pair, mse, psnr, ssim
from .optics import (
    FrequencyGrid,
    SpectrumField,
    apply_aberration,
    apply_na_mask,
    assemble_system_otf,
    lens_otf,
    make_frequency_grid,
    na_cutoff,
    slab_otf,
    total_otf,
    zernike_spherical_phase,
)
from .render import (
    LayerStack,
    RenderOptions,
    RenderedFrame,
    composite,
    discretize_depth,
    parseval_check,
    propagation_otf,
    render_frame,
    render_layer,
)
from .segment import SegmentationResult, foreground_crop, kmeans_depth, segment_foreground

__version__ = "0.1.0"
