#pragma once

#include <stdexcept>
#include <string>

namespace tagbook {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic can catch this and print what().
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define TAGBOOK_ERROR(Name)                                                    \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

TAGBOOK_ERROR(FormatError);
TAGBOOK_ERROR(DimensionMismatch);
TAGBOOK_ERROR(DuplicateId);
TAGBOOK_ERROR(MissingFeature);
TAGBOOK_ERROR(UnknownVideo);
TAGBOOK_ERROR(UnknownTag);
TAGBOOK_ERROR(EmptyVocabulary);
TAGBOOK_ERROR(EmptyInput);
TAGBOOK_ERROR(MissingRefinement);
TAGBOOK_ERROR(EmptyModel);
TAGBOOK_ERROR(DegenerateData);
TAGBOOK_ERROR(SizeTooLarge);
TAGBOOK_ERROR(InsufficientData);
TAGBOOK_ERROR(NoPositives);
TAGBOOK_ERROR(EmptyReference);
TAGBOOK_ERROR(InvalidArgument);
TAGBOOK_ERROR(IoError);

#undef TAGBOOK_ERROR

} // namespace tagbook
