from flask.cli import FlaskGroup

from walklab.app import create_app

cli = FlaskGroup(
    create_app=create_app,
    add_default_commands=False,
    add_version_option=False,
    help="walklab: random walks, comparison chains and certified checks.",
)

if __name__ == "__main__":
    cli()
