"""
File loading for problems, scenarios and designs
"""

from .problem_loader import (Scenario, design_frame, load_design, load_problem, load_scenario,
                             save_design)

__all__ = ['Scenario', 'design_frame', 'load_design', 'load_problem', 'load_scenario', 'save_design']
