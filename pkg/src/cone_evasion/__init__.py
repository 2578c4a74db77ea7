"""Time-optimal strategies of the two-Dubins-car conic-surveillance
evasion game: terminal manifold, closed-form retro-time trajectory
families, singular-surface detection, barrier construction, and forward
replay in the realistic plane."""

from .kinematics import (Controls, CylindricalState, GameParams,
                         RealisticState, ReducedState, cylindrical_dynamics,
                         from_cylindrical, from_reduced, realistic_dynamics,
                         reduced_dynamics, retro_cylindrical_dynamics,
                         retro_reduced_dynamics, to_cylindrical, to_reduced)
from .terminal import (BoundarySide, Seed, SeedKind, TerminalClass,
                       UplMembership, classify, in_lup, in_rup, lbup_radius,
                       rbup_radius, sample_seeds, upl_membership)
from .control import (Costate, SwitchRecord, costate_post_switch,
                      costate_primary, costate_tributary, costate_us,
                      evader_control, find_switch_time, hamiltonian,
                      pursuer_control, switch_function,
                      terminal_evader_control)
from .synthesis import (Emanation, EusBranch, FamilyTag, Termination,
                        Trajectory, TrajectorySegment, barrier_emanation,
                        barrier_state, bupl_switch_check, detect_boundary_hit,
                        eus_state, mirror_trajectory, post_ts_state,
                        primary_state, synthesize, synthesize_barrier,
                        tributary_state)
from .simulate import (Scenario, SimResult, cross_validate, load_scenario,
                       replay, rk4_integrate, run_scenario)

__version__ = "0.1.0"
