// Copyright 2026 The HFCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hfcf {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HFCF_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

HFCF_DEFINE_ERROR(IoError);
HFCF_DEFINE_ERROR(FormatError);
HFCF_DEFINE_ERROR(SpaceError);
HFCF_DEFINE_ERROR(DimError);
HFCF_DEFINE_ERROR(LayoutError);
HFCF_DEFINE_ERROR(SchemeError);
HFCF_DEFINE_ERROR(ParamError);
HFCF_DEFINE_ERROR(RangeError);
HFCF_DEFINE_ERROR(NonFiniteError);
HFCF_DEFINE_ERROR(OverflowError);
HFCF_DEFINE_ERROR(ProtocolError);
HFCF_DEFINE_ERROR(TransportError);
HFCF_DEFINE_ERROR(NormError);
HFCF_DEFINE_ERROR(DuplicateIdentity);
HFCF_DEFINE_ERROR(EmptyGallery);
HFCF_DEFINE_ERROR(UnknownIdentityParams);
HFCF_DEFINE_ERROR(MissingTruth);

#undef HFCF_DEFINE_ERROR

}  // namespace hfcf
