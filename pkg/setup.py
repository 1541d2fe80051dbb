import setuptools

# This only exists to support building in environments that don't support PEP 517.
# It will read the configuration from setup.cfg.
setuptools.setup()
