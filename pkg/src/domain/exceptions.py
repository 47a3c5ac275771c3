class InvalidLayerException(Exception):
    pass


class InvalidStartException(Exception):
    pass


class NoCandidatesException(Exception):
    pass


class PlanningFailedException(Exception):
    pass


class IllConditionedTimesException(Exception):
    pass


class SmoothingFailedException(Exception):
    pass
