/** Error raised for malformed or self-contradictory configuration. */
export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}

/** Error raised when an input file or directory is missing or unusable. */
export class InputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "InputError";
  }
}

/** Error raised when a text payload does not follow its expected grammar. */
export class ParseError extends Error {
  readonly line: number | null;

  constructor(message: string, line: number | null = null) {
    super(line === null ? message : `line ${line}: ${message}`);
    this.name = "ParseError";
    this.line = line;
  }
}
