import os
import threading

from colorama import Fore, Style, init
from dotenv import load_dotenv

# Initialize colorama
init(autoreset=True)
load_dotenv()

_debug = os.getenv("MATROIDCUT_DEBUG", "0").lower() in ("1", "true", "yes")
_print_lock = threading.Lock()


def set_debug(flag: bool):
    global _debug
    _debug = flag


def log(section: str, message: str, color=Fore.WHITE):
    """Helper to print debug messages."""
    if _debug:
        with _print_lock:
            print(f"{color}[{section.upper()}]{Style.RESET_ALL} {message}")


def warn(section: str, message: str):
    """Warnings are printed even when debug tracing is off."""
    with _print_lock:
        print(f"{Fore.YELLOW}[{section.upper()}]{Style.RESET_ALL} {message}")
