"""Plank-assembly cabinet models as shape programs: exact three-view line
drawings, drawing corruption, classical wireframe reconstruction, token
codecs for sequence models, synthetic data generation, and evaluation."""

from .attach import CyclicAttachmentError, infer_attachments
from .boxes import AXES, Box, DOF_NAMES, dof_axis, dof_is_max, opposite_dof, union_aabb
from .codec import (
    InputToken,
    OutputToken,
    SequenceSample,
    decode_output,
    dequantize,
    encode_input,
    encode_output,
    encode_sample,
    legal_pointer_mask,
    quantize,
    quantize_program,
)
from .datagen import GenConfig, build_dataset, gen_cabinet
from .degrade import NoiseConfig, inject_noise, strip_hidden
from .dsl import ParseError, parse_program, print_program
from .evaluation import MatchReport, ModelScore, aggregate, iou, match_planks, prf
from .program import (
    AttachmentGraph,
    Coord,
    Diagnostic,
    EditOnAttachmentError,
    Plank,
    Program,
    ZeroVolumeError,
    canonical_order,
    edit_propagate,
    from_graph,
    literal_table,
    resolve,
    structurally_equal,
    to_graph,
    validate,
)
from .projection import (
    DrawingSet,
    Edge2D,
    ViewDrawing,
    count_edges,
    drawing_from_json,
    drawing_to_json,
    drawing_to_svg,
    hidden_fraction,
    normalize_drawing,
    project,
    project_solids,
)
from .recon import (
    CandidateBlock,
    CandidateEdge,
    CandidateFace,
    CandidateVertex,
    ReconSolution,
    gen_blocks,
    gen_edges,
    gen_faces,
    gen_vertices,
    group_blocks,
    re_project,
    reconstruct,
    snap_drawing,
    union_all,
    verify_search,
)

__version__ = "0.1.0"
