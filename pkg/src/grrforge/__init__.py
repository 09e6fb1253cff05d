"""Construction and certification of cubic graphical regular representations
of finite classical groups in characteristic two."""

__version__ = "0.1.0"
