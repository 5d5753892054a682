import os
import logging

from flask import Flask
from dotenv import load_dotenv

load_dotenv(override=False)

from walklab.core.config import config
from walklab.providers import ExperimentRunner
from walklab.routes import experiments_bp, report_bp


def create_app(config_name=None):
    app = Flask(__name__, instance_relative_config=False)
    config_name = config_name or os.environ.get("WALKLAB_CONFIG", "default")
    config_class = config.get(config_name)
    if config_class is None:
        raise ValueError(f"Unknown configuration {config_name!r}; expected one of {', '.join(config)}")
    app.config.from_object(config_class)

    try:
        problems = config_class.validate()
    except Exception as e:
        problems = [str(e)]
    for problem in problems:
        app.logger.warning(f"Configuration: {problem}")

    log_level_name = getattr(config_class, "LOG_LEVEL", None) or os.environ.get("LOG_LEVEL", "INFO")
    logging.basicConfig(level=getattr(logging, log_level_name.upper(), logging.INFO))

    app.experiment_runner = ExperimentRunner

    # Register blueprints
    app.register_blueprint(experiments_bp)
    app.register_blueprint(report_bp)

    return app
