"""Procedural generator of human-action video scenarios.

Samples complete scenario descriptors from an interpretable parametric model
(world time/weather, human model, action, environment, camera, base motion,
duration, physically plausible motion variation), simulates a spring-rig
follow camera, and emits numeric ground truth: a JSONL manifest plus
per-video CSV tracks of world joint positions, pixel projections and 2D
boxes. Also provides the segmental-consensus multi-task loss math with
gradient checking for mixed real/synthetic training batches.
"""

from .distributions import (
    CategoricalWeights,
    RngStream,
    TriangularParams,
    bernoulli_sample,
    categorical_sample,
    derive_seed,
    triangular_pdf,
    triangular_sample,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .motions import (
    ActionSpec,
    Channel,
    LibraryError,
    MotionClip,
    MotionLibrary,
    ObjectProtocol,
    admissible_motions,
    build_motion_matrix,
    load_library,
    save_library,
)
from .sample_library import build_sample_library
from .skeleton import MUSCLES, RagdollSpec, default_ragdoll
from .ragdoll import (
    PoseTrack,
    RootPlacement,
    VariationPlan,
    VariationRanges,
    apply_variation,
    enforce_limits,
    forward_kinematics,
    plan_variation,
    pose_track,
)
from .camera import (
    CameraState,
    CameraTrajectory,
    RigParams,
    SpringParams,
    bbox_of,
    default_rig,
    initial_state,
    mechanical_energy,
    project,
    sample_rig,
    simulate,
    step,
)
from .scenario import (
    EnvironmentLayout,
    GeneratorParams,
    ScenarioDescriptor,
    ScenarioError,
    WorldState,
    default_params,
    load_params,
    sample_scenario,
    sample_scene,
    sample_world,
    save_params,
    validate_params,
)
from .multitask import (
    LossWeights,
    MixedBatchPlan,
    MultiTaskLabel,
    SegmentScores,
    build_minibatch,
    loss_gradient,
    multitask_loss,
    segmental_consensus,
)
from .generate import (
    DatasetStats,
    GenerationError,
    ManifestRecord,
    audit_records,
    compute_stats,
    generate_dataset,
    make_splits,
    read_manifest,
    render_scenario,
    write_splits,
)

__version__ = "0.1.0"
