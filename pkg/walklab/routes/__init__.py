# Routes package: CLI blueprints
from .experiments import experiments_bp
from .report import report_bp

__all__ = ['experiments_bp', 'report_bp']
