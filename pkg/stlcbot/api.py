"""
STLcBOT API module.
"""

from stlcbot.model.signal import *
from stlcbot.model.formula import *
from stlcbot.model.dynamics import *
from stlcbot.model.world import *
from stlcbot.model.scenario import *
from stlcbot.model.environments import make_environment, make_scenario, grid_path_exists
from stlcbot.parser.stl import parse_formula
from stlcbot.parser.scenario import load_scenario, save_scenario
from stlcbot.sim.monitor import eval_boolean, eval_robustness, eval_ma_stl, ma_robustness
from stlcbot.sim.monitor import streaming_monitor
from stlcbot.sim.integrate import rk4_propagate
from stlcbot.sim.recording import PlanResult
from stlcbot.planner.cbot import CbotParams, plan
from stlcbot.planner.rrt import RrtParams, rrt_plan
from stlcbot.coord.kcbs import KcbsParams, solve
from stlcbot.coord.priority import priority_plan
from stlcbot.coord.validate import validate_plan
