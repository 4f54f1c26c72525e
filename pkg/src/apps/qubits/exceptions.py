# src/apps/qubits/exceptions.py


class SimulationError(Exception):
    """
    Base class for every domain error raised by the simulator.
    Mirrors DRF's APIException: a human-readable `detail` and a stable,
    machine-readable `code` that the command line puts in its error JSON.
    """
    default_detail = "Simulation failed."
    default_code = "simulation_error"

    def __init__(self, detail=None, code=None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def as_dict(self):
        return {"error": self.code, "detail": str(self.detail)}


class UnphysicalParameter(SimulationError, ValueError):
    default_detail = "Parameter outside its physical range."
    default_code = "unphysical_parameter"


class StateAnnihilated(SimulationError):
    default_detail = "State annihilated: the map absorbs the whole state."
    default_code = "state_annihilated"
