"""Motion design toolkit for a lamp-shaped desk robot.

Plans six-joint trajectories that complete a task goal while scoring and
maximizing expressive movement qualities (attention, intention, attitude,
emotion) alongside task completion.
"""

__version__ = "0.1.0"

from .errors import (
    Infeasible,
    InvalidConfig,
    InvalidInput,
    LampbotError,
    TargetMissing,
    UnknownScenario,
    Unreachable,
)
from .kinematics import (
    ChainSpec,
    JointSpec,
    Pose,
    clamp,
    default_chain,
    forward_kinematics,
    gaze_ik,
    inverse_kinematics,
    load_chain,
    reachable,
    save_chain,
)

__all__ = [
    "ChainSpec",
    "JointSpec",
    "Pose",
    "clamp",
    "default_chain",
    "forward_kinematics",
    "gaze_ik",
    "inverse_kinematics",
    "load_chain",
    "reachable",
    "save_chain",
    "LampbotError",
    "InvalidInput",
    "InvalidConfig",
    "UnknownScenario",
    "TargetMissing",
    "Infeasible",
    "Unreachable",
]
