"""Detection, filtering and semantic classification of superimposed text
in video frame sequences, plus table-of-contents generation and evaluation.
"""

__version__ = "0.1.0"

from .errors import (
    ContractError,
    FrameSequenceError,
    InputOutputError,
    ValidationError,
    VidtextError,
)
from .geometry import Box, intersection_area, iou, union_box
from .frames import (
    GrayFrame,
    HsvPixel,
    RgbFrame,
    hsv_planes,
    load_frame_sequence,
    rgb_to_hsv,
    to_grayscale,
)
from .edges import (
    BinaryFrame,
    EdgeFrame,
    binarize,
    edge_pair_difference,
    otsu_threshold,
    sobel_edge_map,
)
from .localize import (
    Block,
    CandidateRegion,
    block_edge_density,
    candidates_from_diff,
    localize_candidates,
    merge_blocks,
    quadtree_split,
)
from .filtering import (
    FilterVerdict,
    LineSegment,
    Lstf,
    contrast_filter,
    extract_lstf,
    filter_regions,
    histogram_peaks,
    hough_line_segments,
    lstf_filter,
    regularity,
)
from .grammar import (
    GrammarDescriptor,
    SubRegionFeature,
    TextClass,
    build_grammar_entry,
    dominant_hsv,
    load_grammar,
    save_grammar,
)
from .classify import (
    ClassifiedRegion,
    MappingCase,
    classify_all,
    classify_region,
    mean_class_distance,
    spatial_mapping,
    subregion_distance,
)
from .toc import Anchor, Toc, TocEntry, build_toc, deduplicate_anchors, render_outputs
from .evaluate import (
    Correspondence,
    Detection,
    EvalReport,
    GroundTruthRegion,
    detection_metrics,
    evaluate,
    identification_metrics,
    load_ground_truth,
    match_detections,
    save_ground_truth,
)
from .synth import (
    BackgroundSpec,
    CorpusSpec,
    MarkerSpec,
    SynthClass,
    TextEvent,
    benchmark_spec,
    generate_synthetic_corpus,
    write_corpus,
)
from .config import PipelineConfig, apply_overrides, load_config
from .pipeline import run_classify, run_detect, run_eval, run_synth, run_toc
