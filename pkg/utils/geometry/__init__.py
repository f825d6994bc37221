# model_spaces registers the bundled spaces with metric_core
from . import metric_core, model_spaces  # noqa: F401
