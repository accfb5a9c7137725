from .dispatcher import Dispatcher, ForcedDispatcher, dispatch  # noqa: F401
from .dual import build_charges, build_dual, certify  # noqa: F401
from .engine import Engine, RunLog, run  # noqa: F401
from .metrics import run_cost  # noqa: F401
from .model import EdgeRef, Instance, Packet, Topology  # noqa: F401
from .oracle import OracleLimits, brute_force_opt  # noqa: F401
from .workload import parse_instance, serialize_instance  # noqa: F401
