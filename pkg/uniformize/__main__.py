from uniformize.cli import cli_app

cli_app()
