from pathlib import Path

from dynaconf import Dynaconf

settings = Dynaconf(
    envvar_prefix="MNEWTON",
    root_path=str(Path(__file__).resolve().parent),
    settings_files=['settings.json', '.secrets.json'],
)

# `envvar_prefix` = export envvars with `export MNEWTON_GAMMA__DELTA=1e-6`.
# `settings_files` = Load these files in the order.
