"""Python interface to the tdisim core.

Re-exports everything from the compiled extension module: model builders,
correlation functions, interferometric phase scans, the classicality
discriminator, classical jump-process estimators, and model (de)serialization.
"""

try:
    # Installed layout: the extension lives inside this package.
    from . import _tdisim as _impl
except ImportError:
    # Build-tree layout: the extension sits next to the build outputs and is
    # reached through sys.path directly.
    import _tdisim as _impl

globals().update(
    {name: getattr(_impl, name) for name in dir(_impl) if not name.startswith("_")}
)

__version__ = _impl.__version__
__all__ = sorted(name for name in dir(_impl) if not name.startswith("_"))
