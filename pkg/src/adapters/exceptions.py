class ParameterStoreException(Exception):
    pass


class ParameterNotFoundException(Exception):
    pass


class ModuleNotFoundException(Exception):
    pass


class LayerFormatException(Exception):
    pass


class ScanFormatException(Exception):
    pass


class GraphFormatException(Exception):
    pass


class PathFormatException(Exception):
    pass
